#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

#include "ajk/errors.hpp"
#include "ajk/types.hpp"

namespace ajk {

// Canonical state space D = R_{>=0}^m x R^n; U = C_{<=0}^m x iR^n.
struct StateSpaceShape {
    std::size_t m = 0;
    std::size_t n = 0;

    std::size_t d() const { return m + n; }
    bool is_nonneg_coord(std::size_t k) const { return k < m; }

    bool contains(const rvec& x, double tol = 0.0) const {
        if (x.size() != d()) return false;
        for (std::size_t k = 0; k < m; ++k)
            if (x[k] < -tol) return false;
        return true;
    }

    // DomainViolation when Re u_k > 0 on a nonnegative coordinate. Real
    // coordinates are not constrained here; restarts of models without the
    // support condition legitimately carry Re != 0 there.
    void require_in_U(const cvec& u, double tol = 1e-12) const;
};

// Truncation function h(x) = x * 1{||x||_2 <= 1}, boundary included.
rvec truncation_h(const rvec& x);

// Point mass: weight * delta_x, x in D \ {0}.
struct PointMass {
    rvec x;
    double weight = 1.0;
};

// weight * (law of offset + xi e_axis), xi ~ N(mean, stddev^2); offset[axis]
// must be zero. With restrict_to_D the law of xi is conditioned on xi >= 0
// (renormalized) and exponential integrals fall back to quadrature.
struct GaussianAxis {
    std::size_t axis = 0;
    double mean = 0.0;
    double stddev = 1.0;
    rvec offset;  // empty = zero offset
    double weight = 1.0;
    bool restrict_to_D = false;
};

// weight * one-sided exponential density rate*exp(-rate*xi) on xi > 0 along
// a nonnegative axis.
struct ExponentialAxis {
    std::size_t axis = 0;
    double rate = 1.0;
    double weight = 1.0;
};

// weight * density(x) dx on the box [lo, hi]; quadrature throughout.
struct NumericDensity {
    std::function<double(const rvec&)> density;
    rvec lo;
    rvec hi;
    double weight = 1.0;
};

using JumpComponent = std::variant<PointMass, GaussianAxis, ExponentialAxis, NumericDensity>;

// Finite-component parametric Levy measure on D \ {0}.
class JumpMeasureSpec {
public:
    JumpMeasureSpec() = default;
    JumpMeasureSpec(std::size_t dim, std::vector<JumpComponent> components)
        : dim_(dim), components_(std::move(components)) {}

    static JumpMeasureSpec empty(std::size_t dim) { return JumpMeasureSpec(dim, {}); }

    std::size_t dim() const { return dim_; }
    bool is_empty() const { return components_.empty(); }
    const std::vector<JumpComponent>& components() const { return components_; }

    double total_mass() const;

    // int (e^{<x,u>} - 1 - <h(x), u>) mu(dx), closed form where available.
    cplx exp_integral(const cvec& u) const;

    // int (e^{<x,u>} - 1 - <x, u>) mu(dx); requires integrable jumps.
    cplx exp_integral_untruncated(const cvec& u) const;

    // int h_i(x) mu(dx) for all i.
    rvec h_moment() const;

    // int x mu(dx) (untruncated first moment).
    rvec mean_vector() const;

    // integral of <h_{I\i}(x), 1> + ||h_{J u i}(x)||^2; the index i ranges
    // over 0..d where 0 means "no coordinate removed from I / added to J".
    double big_m(const StateSpaceShape& shape, std::size_t i) const;

    // All components supported inside D \ {0}?
    bool supported_on(const StateSpaceShape& shape, std::string* why = nullptr) const;

    // Generic integral of f against the measure (quadrature for the
    // density components, exact for point masses).
    double integrate(const std::function<double(const rvec&)>& f) const;

    // Draw one jump from the normalized measure. NumericDensity components
    // are not samplable.
    template <typename RngT>
    rvec sample(RngT& rng) const;

private:
    std::size_t dim_ = 0;
    std::vector<JumpComponent> components_;
};

template <typename RngT>
rvec JumpMeasureSpec::sample(RngT& rng) const {
    double total = 0.0;
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) total += p->weight;
        else if (const auto* p = std::get_if<GaussianAxis>(&c)) total += p->weight;
        else if (const auto* p = std::get_if<ExponentialAxis>(&c)) total += p->weight;
        else throw Error("JumpMeasureSpec::sample: component not samplable");
    }
    double pick = rng.uniform() * total;
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) {
            pick -= p->weight;
            if (pick <= 0.0) return p->x;
        } else if (const auto* p = std::get_if<GaussianAxis>(&c)) {
            pick -= p->weight;
            if (pick <= 0.0) {
                double xi = rng.normal(p->mean, p->stddev);
                if (p->restrict_to_D)
                    while (xi < 0.0) xi = rng.normal(p->mean, p->stddev);
                rvec x = p->offset.empty() ? rvec(dim_, 0.0) : p->offset;
                x.resize(dim_, 0.0);
                x[p->axis] = xi;
                return x;
            }
        } else if (const auto* p = std::get_if<ExponentialAxis>(&c)) {
            pick -= p->weight;
            if (pick <= 0.0) {
                rvec x(dim_, 0.0);
                x[p->axis] = -std::log(1.0 - rng.uniform()) / p->rate;
                return x;
            }
        }
    }
    return rvec(dim_, 0.0);
}

}  // namespace ajk
