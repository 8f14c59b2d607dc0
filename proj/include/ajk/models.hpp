#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ajk/parameter_set.hpp"
#include "ajk/rng.hpp"

namespace ajk {

// Closed-form (phi_s(t,u), psi_s(t,u)); satisfies the semi-flow identity by
// construction when present.
using ClosedForm = std::function<std::pair<cplx, cvec>(double s, double t, const cvec& u)>;

// Exact path transition machinery. step() advances over an atom-free
// interval; atom_jump() applies the distributional jump at an atom of A.
class Simulator {
public:
    virtual ~Simulator() = default;
    virtual void step(double t0, double t1, rvec& x, Rng& rng) const = 0;
    virtual void atom_jump(double t, rvec& x, Rng& rng) const = 0;
};

struct ModelSpec {
    std::string name;
    AffineParameterSet params;
    std::optional<ClosedForm> closed_form;
    std::shared_ptr<const Simulator> exact_simulator;
    // Ex.-6.5-style models: valid characteristic-function test vectors whose
    // support does not span the state space; psi may leave iR on real
    // coordinates and uniqueness theory does not apply.
    bool violates_support_condition = false;

    const StateSpaceShape& shape() const { return params.shape(); }
    const DriverMeasure& driver() const { return params.driver(); }
};

// Catalog constructors. `horizon` bounds the driver support.

ModelSpec zero_model(std::size_t m, std::size_t n, double horizon = 10.0);

// Homogeneous Poisson process (nonnegative integer state).
ModelSpec poisson_process(double lambda, double horizon = 10.0);

// Poisson plus an independent (+/-1 + normal * sqrt(N_tau)) shock at the
// fixed time tau. Characteristic-function test vector; no support condition.
ModelSpec poisson_with_normal_jump(double lambda, double tau, double horizon = 10.0);

// Discrete-time inhomogeneous Poisson embedded at integer times; p_schedule
// holds P(jump at n) for n = 1..N.
ModelSpec discrete_poisson(const std::vector<double>& p_schedule);

// dr = (alpha + beta r) dt + sigma dW.
ModelSpec vasicek(double alpha, double beta, double sigma, double horizon = 10.0);

// Vasicek plus independent N(0, gamma_jump^2) shocks at fixed jump_times.
ModelSpec discontinuous_vasicek(double alpha, double beta, double sigma, double gamma_jump,
                                const std::vector<double>& jump_times, double horizon = 10.0);

// dX = (a0 - kappa X) dt + sigma sqrt(X) dW on the nonnegative half-line.
ModelSpec cir_type(double kappa, double sigma, double a0, double horizon = 10.0);

// AR(1) time series X_n = alpha(n) X_{n-1} + eps_n embedded at integers.
// noise_logcf is the log-characteristic function of eps (noise_logcf(0)=0);
// noise_sampler, when given, enables exact simulation.
ModelSpec ar1_embed(const std::vector<double>& alpha_schedule,
                    const std::function<cplx(const cplx&)>& noise_logcf,
                    std::function<double(Rng&)> noise_sampler = nullptr);

// CLI-facing factory: model by name with key=value parameters; list-valued
// parameters (jump-times, p, a) are semicolon-separated in `lists`.
struct CatalogArgs {
    std::map<std::string, double> scalars;
    std::map<std::string, std::vector<double>> lists;

    double get(const std::string& key, double fallback) const {
        auto it = scalars.find(key);
        return it == scalars.end() ? fallback : it->second;
    }
    bool has(const std::string& key) const { return scalars.count(key) || lists.count(key); }
};

ModelSpec make_catalog_model(const std::string& name, const CatalogArgs& args);
std::vector<std::string> catalog_names();

}  // namespace ajk
