#pragma once

#include <functional>
#include <vector>

#include "ajk/driver_measure.hpp"
#include "ajk/types.hpp"

namespace ajk {

// One breakpoint of a cadlag trajectory. `value`/`derivative` describe the
// right side of t; when the solution jumps at t, the left limit and the
// derivative on the left side are recorded too.
struct TrajectoryNode {
    double t;
    cvec value;
    cvec derivative;
    bool has_left = false;
    cvec left_value;
    cvec left_derivative;
};

// Right-continuous piecewise trajectory with cubic Hermite dense output
// between breakpoints. Write-once: built by a solver, then immutable.
class StieltjesTrajectory {
public:
    StieltjesTrajectory() = default;
    explicit StieltjesTrajectory(std::vector<TrajectoryNode> nodes);

    std::size_t dim() const { return nodes_.empty() ? 0 : nodes_.front().value.size(); }
    const std::vector<TrajectoryNode>& nodes() const { return nodes_; }
    double t_front() const { return nodes_.front().t; }
    double t_back() const { return nodes_.back().t; }

    // Value at t with the cadlag convention.
    cvec value(double t) const;

    // Left limit at t.
    cvec left_value(double t) const;

    std::vector<double> breakpoints() const;

private:
    std::vector<TrajectoryNode> nodes_;
    std::size_t locate(double t) const;
};

namespace ode {
struct PanelNode;
}

// Assemble a trajectory from solver nodes listed in decreasing time.
// Duplicated times carry (right, left) data pairs at jumps and kinks.
StieltjesTrajectory make_trajectory_from_backward(std::vector<ode::PanelNode> desc);

// exp(int_t^T L dA^c) * prod_{atoms in (t,T]} (1 + L(t_j) dA_j).
// Requires 1 + L(t_j) dA_j >= 0 at every atom in (t, T].
double pseudo_exponential(const DriverMeasure& A, const std::function<double(double)>& L, double t,
                          double T);

// delta * exp(int_(t,T] L dA), atoms included. Upper-bound certificate.
double gronwall_bound(const DriverMeasure& A, double delta, const std::function<double(double)>& L,
                      double t, double T);

// Backward solution of dg/dA = -L(t) g with g(T) = terminal, by stepwise
// product integration: per step, g <- exp(M) g with M the Gauss-Kronrod
// integral of a(s) L(s); a commutator correction handles mildly
// noncommuting L. Scalar and commuting-family cases are exact up to
// quadrature error. Atoms apply g(t-) = (I + dA L(t)) g(t).
StieltjesTrajectory solve_linear(const DriverMeasure& A,
                                 const std::function<rmat(double)>& L, const rvec& terminal,
                                 double T);

// Scalar backward measure ODE dg/dA = -F(t, g), g(T) = terminal. Continuous
// stretches use an adaptive RK pair in calendar time with the density folded
// into the right-hand side; atoms apply g(t-) = g(t) + F(t, g(t)) dA_t.
StieltjesTrajectory solve_scalar_measure_ode(const DriverMeasure& A,
                                             const std::function<double(double, double)>& F,
                                             double terminal, double T);

}  // namespace ajk
