#include "ajk/parameter_set.hpp"

#include <cmath>

#include "ajk/errors.hpp"

namespace ajk {

cplx levy_khintchine_exponent(const rvec& beta, const rmat& alpha, const JumpMeasureSpec& mu,
                              const cvec& u, const StateSpaceShape& shape) {
    shape.require_in_U(u);
    cplx v = dot(beta, u) + 0.5 * quad_form(alpha, u);
    if (!mu.is_empty()) v += mu.exp_integral(u);
    return v;
}

AffineParameterSet::AffineParameterSet(StateSpaceShape shape, DriverMeasure driver,
                                       std::vector<TimeVec> beta, std::vector<TimeMat> alpha,
                                       std::vector<TimeJump> mu, std::map<double, GammaForm> gamma)
    : shape_(shape),
      driver_(std::move(driver)),
      beta_(std::move(beta)),
      alpha_(std::move(alpha)),
      mu_(std::move(mu)),
      gamma_(std::move(gamma)) {
    const std::size_t k = shape_.d() + 1;
    if (shape_.d() == 0) throw InvalidParameter("AffineParameterSet: d must be >= 1");
    if (beta_.size() != k || alpha_.size() != k || mu_.size() != k)
        throw InvalidParameter("AffineParameterSet: beta/alpha/mu must have d+1 entries");
    for (const auto& [t, form] : gamma_) {
        if (driver_.atom_at(t) == nullptr)
            throw InvalidParameter("AffineParameterSet: gamma given at t=" + std::to_string(t) +
                                   " which is not an atom of A");
        if (const auto* e = std::get_if<EnhancedGamma>(&form)) {
            if (e->beta.size() != k || e->alpha.size() != k || e->mu.size() != k)
                throw InvalidParameter("EnhancedGamma: needs d+1 triplets");
        }
    }
}

AffineParameterSet AffineParameterSet::zero(StateSpaceShape shape, DriverMeasure driver) {
    const std::size_t d = shape.d();
    return AffineParameterSet(shape, std::move(driver), zero_betas(d), zero_alphas(d),
                              empty_mus(d), {});
}

cplx AffineParameterSet::F_eval(double t, const cvec& u) const {
    return levy_khintchine_exponent(beta_[0](t), alpha_[0](t), mu_[0](t), u, shape_);
}

cplx AffineParameterSet::R_eval_i(std::size_t i, double t, const cvec& u) const {
    return levy_khintchine_exponent(beta_[i](t), alpha_[i](t), mu_[i](t), u, shape_);
}

cvec AffineParameterSet::R_eval(double t, const cvec& u) const {
    cvec out(shape_.d());
    for (std::size_t i = 1; i <= shape_.d(); ++i) out[i - 1] = R_eval_i(i, t, u);
    return out;
}

std::pair<cplx, cvec> AffineParameterSet::gamma_eval(double t_atom, const cvec& u) const {
    if (driver_.atom_at(t_atom) == nullptr)
        throw NotAnAtom("gamma_eval: t=" + std::to_string(t_atom) + " is not an atom of A");
    auto it = gamma_.find(t_atom);
    if (it == gamma_.end()) {
        // Atom of A with no transform attached: trivial jump.
        return {cplx{0.0, 0.0}, cvec(shape_.d(), cplx{0.0, 0.0})};
    }
    if (const auto* tab = std::get_if<TableGamma>(&it->second)) return tab->map(u);
    const auto& e = std::get<EnhancedGamma>(it->second);
    cplx g0 = levy_khintchine_exponent(e.beta[0], e.alpha[0], e.mu[0], u, shape_);
    cvec gbar(shape_.d());
    for (std::size_t i = 1; i <= shape_.d(); ++i)
        gbar[i - 1] = levy_khintchine_exponent(e.beta[i], e.alpha[i], e.mu[i], u, shape_);
    return {g0, gbar};
}

TimeVec const_vec(rvec v) {
    return [v = std::move(v)](double) { return v; };
}

TimeMat const_mat(rmat m) {
    return [m = std::move(m)](double) { return m; };
}

TimeJump const_jump(JumpMeasureSpec j) {
    return [j = std::move(j)](double) { return j; };
}

std::vector<TimeVec> zero_betas(std::size_t d) {
    std::vector<TimeVec> out;
    for (std::size_t i = 0; i <= d; ++i) out.push_back(const_vec(rvec(d, 0.0)));
    return out;
}

std::vector<TimeMat> zero_alphas(std::size_t d) {
    std::vector<TimeMat> out;
    for (std::size_t i = 0; i <= d; ++i) out.push_back(const_mat(rmat(d)));
    return out;
}

std::vector<TimeJump> empty_mus(std::size_t d) {
    std::vector<TimeJump> out;
    for (std::size_t i = 0; i <= d; ++i) out.push_back(const_jump(JumpMeasureSpec::empty(d)));
    return out;
}

}  // namespace ajk
