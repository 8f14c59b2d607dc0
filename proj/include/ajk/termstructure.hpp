#pragma once

#include <functional>
#include <vector>

#include "ajk/models.hpp"
#include "ajk/simulate.hpp"

namespace ajk {

// Extended HJM machinery on the state X = (A_t, R_t, r_t): bond prices
// P(t,T) = exp(-int_(t,T] f(t,v) dA_v) with forward rates loaded on X by
// f(t,v) = f0(v) + int_(0,t] a(s,v) dX_s. Three constructed loading
// families; the short-rate factor follows an OU process, with independent
// Gaussian shocks at fixed times in the discontinuous family.
enum class LoadingKind { Vasicek, Gaussian, Discontinuous };

class TermStructureModel {
public:
    LoadingKind kind;
    double alpha, beta, sigma;
    double gamma_jump = 0.0;
    std::vector<double> jump_times;
    double r0;
    double horizon;
    // Multiplies the first loading component everywhere; 1 is the
    // arbitrage-free construction, anything else breaks the drift condition
    // (negative-control knob).
    double a1_scale = 1.0;

    // The d-dimensional affine driver (canonical (A_t, R_t, r_t) form).
    const ModelSpec& x_model() const { return x_model_; }

    // Loading field A(t,T) = int_{[t,T]} a(t,v) dA_v, closed interval.
    rvec A_field(double t, double T) const;

    double f0_value(double v) const;

    // dv-density value of f(t, .) at v, given the state (r_t, R_t).
    double forward_density(double t, double v, double r, double R) const;

    // atom value of f(t, .) at an atom t_i of A.
    double forward_atom(double t, double ti, double r, double R) const;

    // f(t,t): the numeraire short rate. Equals the simulated factor r_t for
    // the Vasicek-family implied initial curve.
    double short_rate(double t, double r, double R) const;

    // log P(t,T) = -(c0 + c_r r_t + c_R R_t).
    struct BondCoeffs {
        double c0 = 0.0, c_r = 0.0, c_R = 0.0;
    };
    BondCoeffs bond_coeffs(double t, double T) const;

    double bond_price(double t, double T, double r, double R) const;

    // Money-account exponent int_(0,t] f(u,u) dA_u along a simulated path;
    // k indexes the grid time. Exact for the Vasicek/discontinuous families,
    // trapezoidal in int R du for the Gaussian one.
    double numeraire_log(const PathEnsemble& e, std::size_t path, std::size_t k) const;

    static TermStructureModel make(LoadingKind kind, double alpha, double beta, double sigma,
                                   double gamma_jump, std::vector<double> jump_times, double r0,
                                   double horizon, double a1_scale,
                                   std::function<double(double)> f0_custom);

private:
    std::function<double(double)> f0_custom_;  // Gaussian family only
    ModelSpec x_model_ = zero_model(0, 3, 1.0);

    double det_density(double t, double v) const;   // accumulated a^1 dv-slice
    double det_atom(double t, double ti) const;     // accumulated a^1 atom slice
    double a3_closed(double t, double T) const;     // psi_beta + closed atom count
};

TermStructureModel vasicek_term_structure(double alpha, double beta, double sigma, double r0,
                                          double horizon, double a1_scale = 1.0);
TermStructureModel gaussian_term_structure(double alpha, double beta, double sigma, double r0,
                                           double horizon, double a1_scale = 1.0,
                                           std::function<double(double)> f0 = nullptr);
TermStructureModel discontinuous_term_structure(double alpha, double beta, double sigma,
                                                double gamma_jump, std::vector<double> jump_times,
                                                double r0, double horizon, double a1_scale = 1.0);

// Loading fields alone, (t,T) -> (A^1, A^2, A^3).
std::function<rvec(double, double)> vasicek_loadings(double alpha, double beta, double sigma);
std::function<rvec(double, double)> gaussian_loadings(double alpha, double sigma, double beta);
std::function<rvec(double, double)> discontinuous_loadings(double alpha, double beta, double sigma,
                                                           double gamma_jump,
                                                           std::vector<double> jump_times);

// Max-over-index residual of the affine drift condition at (t, T); at atoms
// of A the atom-time form with the jump kernel applies.
double drift_residual(const TermStructureModel& m, double t, double T);

struct DriftConditionReport {
    double max_residual = 0.0;
    double worst_t = 0.0, worst_T = 0.0;
    bool pass = false;  // max_residual < 1e-8
};

DriftConditionReport verify_drift_condition(const TermStructureModel& m, int n_pairs,
                                            std::uint64_t seed);

struct BondMartingaleReport {
    bool drift_precondition_ok = false;
    double max_drift_residual = 0.0;
    std::vector<double> times;
    std::vector<double> z;
    double max_z = 0.0;
    bool pass = false;
};

struct MartingaleTestOptions {
    std::size_t eval_points = 8;
    std::size_t sim_grid_points = 64;
    int threads = 1;
};

// Simulates the factor, prices bonds along paths and checks that discounted
// prices have a flat mean within four standard errors.
BondMartingaleReport martingale_test(const TermStructureModel& m, double T, std::size_t n_paths,
                                     std::uint64_t seed, const MartingaleTestOptions& opt = {});

}  // namespace ajk
