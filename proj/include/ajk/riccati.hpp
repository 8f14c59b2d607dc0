#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ajk/parameter_set.hpp"
#include "ajk/stieltjes.hpp"

namespace ajk {

struct RiccatiOptions {
    // One order tighter than the verification thresholds nominally need;
    // two solves enter the semi-flow residual, so the slack is deliberate.
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    double blowup_cap = 1e8;       // BlowUp when ||psi|| exceeds this
    double domain_exit_tol = 1e-8; // DomainExit when Re psi^I exceeds this
    double project_tol = 1e-13;    // snap |Re psi^J| below this to 0
};

// Jump recorded while crossing an atom backward:
// d_phi = phi(t) - phi(t-) = -gamma_0(t, psi_t), d_psi likewise.
struct JumpRecord {
    double t;
    cplx d_phi;
    cvec d_psi;
};

class RiccatiSolution {
public:
    RiccatiSolution(double T, cvec u, StieltjesTrajectory phi, StieltjesTrajectory psi,
                    std::vector<JumpRecord> jump_log, double error_estimate)
        : T_(T),
          u_(std::move(u)),
          phi_(std::move(phi)),
          psi_(std::move(psi)),
          jump_log_(std::move(jump_log)),
          error_estimate_(error_estimate) {}

    double T() const { return T_; }
    const cvec& u() const { return u_; }
    const StieltjesTrajectory& phi_trajectory() const { return phi_; }
    const StieltjesTrajectory& psi_trajectory() const { return psi_; }
    const std::vector<JumpRecord>& jump_log() const { return jump_log_; }
    double error_estimate() const { return error_estimate_; }

    cplx phi(double s) const { return phi_.value(s)[0]; }
    cvec psi(double s) const { return psi_.value(s); }
    cplx phi_left(double s) const { return phi_.left_value(s)[0]; }
    cvec psi_left(double s) const { return psi_.left_value(s); }

private:
    double T_;
    cvec u_;
    StieltjesTrajectory phi_;
    StieltjesTrajectory psi_;
    std::vector<JumpRecord> jump_log_;
    double error_estimate_;
};

// Backward solve of the measure Riccati system from (T, u): between atoms
//   d phi / dA^c = -F(t, psi),  d psi / dA^c = -R(t, psi),
// integrated as calendar-time ODEs with the density folded in; at each atom
// (decreasing time, an atom at T first)
//   psi(t-) = psi(t) + gammabar(t, psi(t)),  phi(t-) = phi(t) + gamma_0(t, psi(t)).
RiccatiSolution solve_backward(const AffineParameterSet& p, double T, const cvec& u,
                               const RiccatiOptions& opt = {});

// exp(phi_s(T,u) + <psi_s(T,u), x>).
cplx char_fn(const RiccatiSolution& sol, double s, const rvec& x);

struct SemiflowResiduals {
    double phi;
    double psi;
};

// Residuals of the semi-flow identity via two independent solves: the full
// one to T and a restart at r with terminal value psi_r(T, u).
SemiflowResiduals semiflow_check(const AffineParameterSet& p, double T, const cvec& u, double r,
                                 const RiccatiOptions& opt = {});

struct ConservativenessReport {
    enum class Verdict { Conservative, Inconclusive, BlowUpDetected };
    Verdict verdict = Verdict::Inconclusive;
    std::string detail;
    double zero_residual = 0.0;          // max |(phi,psi)| of the u=0 solve
    std::vector<double> probe_expansion; // max_t ||g_t|| / epsilon per probe

    std::string verdict_string() const {
        switch (verdict) {
            case Verdict::Conservative: return "conservative (numerically)";
            case Verdict::BlowUpDetected: return "blow-up";
            default: return "inconclusive";
        }
    }
};

// Numerical sufficient check of the zero-solution criterion: the exact g=0
// solve must have vanishing residual and perturbed starts -eps*1 on the
// nonnegative block must not expand. A certificate of uniqueness it is not.
ConservativenessReport conservativeness_check(const AffineParameterSet& p, double T,
                                              const RiccatiOptions& opt = {});

}  // namespace ajk
