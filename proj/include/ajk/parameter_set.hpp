#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "ajk/driver_measure.hpp"
#include "ajk/jump_measure.hpp"
#include "ajk/types.hpp"

namespace ajk {

// <beta, u> + 1/2 <u, alpha u> + int (e^{<x,u>} - 1 - <h(x),u>) mu(dx).
// Requires Re u <= 0 on the first `shape.m` coordinates.
cplx levy_khintchine_exponent(const rvec& beta, const rmat& alpha, const JumpMeasureSpec& mu,
                              const cvec& u, const StateSpaceShape& shape);

using TimeVec = std::function<rvec(double)>;
using TimeMat = std::function<rmat(double)>;
using TimeJump = std::function<JumpMeasureSpec(double)>;

// Atom-time jump transform in enhanced (Levy-Khintchine triplet) form:
// gamma_i(t, u) = <beta_i, u> + 1/2 <u, alpha_i u> + int(...) mu_i, i = 0..d.
struct EnhancedGamma {
    std::vector<rvec> beta;
    std::vector<rmat> alpha;
    std::vector<JumpMeasureSpec> mu;
};

// Black-box transform u -> (gamma_0, gammabar).
struct TableGamma {
    std::function<std::pair<cplx, cvec>(const cvec&)> map;
};

using GammaForm = std::variant<EnhancedGamma, TableGamma>;

// Good parameter set (A, gamma, beta, alpha, mu) on the canonical state
// space. beta/alpha/mu are indexed 0..d; gamma lives only at atoms of A.
class AffineParameterSet {
public:
    AffineParameterSet(StateSpaceShape shape, DriverMeasure driver, std::vector<TimeVec> beta,
                       std::vector<TimeMat> alpha, std::vector<TimeJump> mu,
                       std::map<double, GammaForm> gamma);

    // All-zero parameters over the given driver.
    static AffineParameterSet zero(StateSpaceShape shape, DriverMeasure driver);

    const StateSpaceShape& shape() const { return shape_; }
    const DriverMeasure& driver() const { return driver_; }
    std::size_t d() const { return shape_.d(); }

    rvec beta(std::size_t i, double t) const { return beta_[i](t); }
    rmat alpha(std::size_t i, double t) const { return alpha_[i](t); }
    JumpMeasureSpec mu(std::size_t i, double t) const { return mu_[i](t); }

    // F(t, u): the Levy-Khintchine form at index 0.
    cplx F_eval(double t, const cvec& u) const;

    // R(t, u) = (R_1, ..., R_d)(t, u).
    cvec R_eval(double t, const cvec& u) const;
    cplx R_eval_i(std::size_t i, double t, const cvec& u) const;  // i in 1..d

    // (gamma_0(t, u), gammabar(t, u)) at an atom of A; NotAnAtom otherwise.
    std::pair<cplx, cvec> gamma_eval(double t_atom, const cvec& u) const;

    bool has_gamma(double t_atom) const { return gamma_.count(t_atom) > 0; }
    const std::map<double, GammaForm>& gamma_map() const { return gamma_; }

private:
    StateSpaceShape shape_;
    DriverMeasure driver_;
    std::vector<TimeVec> beta_;
    std::vector<TimeMat> alpha_;
    std::vector<TimeJump> mu_;
    std::map<double, GammaForm> gamma_;
};

// Convenience builders for constant-in-time parameters.
TimeVec const_vec(rvec v);
TimeMat const_mat(rmat m);
TimeJump const_jump(JumpMeasureSpec j);
std::vector<TimeVec> zero_betas(std::size_t d);
std::vector<TimeMat> zero_alphas(std::size_t d);
std::vector<TimeJump> empty_mus(std::size_t d);

}  // namespace ajk
