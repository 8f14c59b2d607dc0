#include "ajk/riccati.hpp"

#include <algorithm>
#include <cmath>

#include "ajk/errors.hpp"
#include "ajk/ode_rk45.hpp"

namespace ajk {

namespace {

// State layout: y[0] = phi, y[1..d] = psi.
cvec psi_of(const cvec& y) { return cvec(y.begin() + 1, y.end()); }

// Stage-safe argument: clamp stray positive real parts on the nonnegative
// block so Levy-Khintchine integrals stay evaluable mid-step.
cvec clamp_I(const cvec& psi, std::size_t m) {
    cvec out = psi;
    for (std::size_t k = 0; k < m; ++k)
        if (out[k].real() > 0.0) out[k] = cplx{0.0, out[k].imag()};
    return out;
}

}  // namespace

RiccatiSolution solve_backward(const AffineParameterSet& p, double T, const cvec& u,
                               const RiccatiOptions& opt) {
    const StateSpaceShape& sh = p.shape();
    const std::size_t d = sh.d(), m = sh.m;
    if (u.size() != d) throw DomainViolation("solve_backward: u has wrong dimension");
    sh.require_in_U(u);
    p.driver().require_range(T);

    const DriverMeasure& A = p.driver();
    std::vector<Atom> atoms = A.atoms_in(-1.0, T);
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t > b.t; });

    std::vector<ode::PanelNode> desc;
    std::vector<JumpRecord> jump_log;
    double err_accum = 0.0;

    cvec y(d + 1, cplx{0.0, 0.0});
    std::copy(u.begin(), u.end(), y.begin() + 1);

    ode::Options oopt;
    oopt.abs_tol = opt.abs_tol;
    oopt.rel_tol = opt.rel_tol;

    auto post = [&](double t, cvec& state) {
        double nrm = 0.0;
        for (std::size_t k = 1; k <= d; ++k) nrm += std::norm(state[k]);
        nrm = std::sqrt(nrm);
        if (nrm > opt.blowup_cap)
            throw BlowUp(t, "||psi|| = " + std::to_string(nrm) + " exceeded cap at t=" +
                                std::to_string(t));
        for (std::size_t k = 1; k <= d; ++k) {
            const double re = state[k].real();
            if (k <= m) {
                if (re > opt.domain_exit_tol)
                    throw DomainExit(t, "Re psi_" + std::to_string(k) + " = " +
                                            std::to_string(re) + " left U at t=" +
                                            std::to_string(t));
                if (re > 0.0) state[k] = cplx{0.0, state[k].imag()};
            } else if (std::abs(re) < opt.project_tol) {
                state[k] = cplx{0.0, state[k].imag()};
            }
        }
    };

    auto rhs_at = [&](double t, const cvec& state, double density) {
        cvec out(d + 1);
        if (density == 0.0) {
            std::fill(out.begin(), out.end(), cplx{0.0, 0.0});
            return out;
        }
        const cvec psi = clamp_I(psi_of(state), m);
        out[0] = -density * p.F_eval(t, psi);
        const cvec r = p.R_eval(t, psi);
        for (std::size_t k = 0; k < d; ++k) out[k + 1] = -density * r[k];
        return out;
    };

    auto run_stretch = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        std::vector<double> pts = A.density_breaks(lo, hi);
        pts.insert(pts.begin(), lo);
        pts.push_back(hi);
        for (std::size_t i = pts.size(); i-- > 1;) {
            const Polynomial& dens = A.density_on(pts[i - 1], pts[i]);
            if (dens.is_zero()) {
                // Pure-atom stretch: constant propagation, exact.
                const cvec f0(d + 1, cplx{0.0, 0.0});
                desc.push_back({pts[i], y, f0});
                desc.push_back({pts[i - 1], y, f0});
                continue;
            }
            auto rhs = [&](double t, const cvec& state) { return rhs_at(t, state, dens(t)); };
            err_accum += ode::integrate_backward(rhs, pts[i], pts[i - 1], y, oopt, desc, post);
            y = desc.back().y;
        }
    };

    bool at_terminal = true;
    double t_hi = T;
    for (const auto& atom : atoms) {
        if (t_hi > atom.t) {
            run_stretch(atom.t, t_hi);
            at_terminal = false;
        } else if (at_terminal) {
            // Atom located exactly at T: record the terminal, jump first.
            desc.push_back({T, y, rhs_at(T, y, A.density(T))});
            at_terminal = false;
        }
        const cvec psi = psi_of(y);
        auto [g0, gbar] = p.gamma_eval(atom.t, psi);
        JumpRecord rec;
        rec.t = atom.t;
        rec.d_phi = -g0;
        rec.d_psi = cvec(d);
        for (std::size_t k = 0; k < d; ++k) rec.d_psi[k] = -gbar[k];
        jump_log.push_back(rec);
        y[0] += g0;
        for (std::size_t k = 0; k < d; ++k) y[k + 1] += gbar[k];
        post(atom.t, y);
        desc.push_back({atom.t, y, rhs_at(atom.t, y, A.density(atom.t))});
        t_hi = atom.t;
    }
    if (t_hi > 0.0) {
        run_stretch(0.0, t_hi);
    } else if (at_terminal) {
        desc.push_back({T, y, rhs_at(T, y, T < A.horizon() ? A.density(T) : 0.0)});
    }
    std::reverse(jump_log.begin(), jump_log.end());

    // Split the joint trajectory into phi and psi parts.
    std::vector<ode::PanelNode> phi_nodes, psi_nodes;
    phi_nodes.reserve(desc.size());
    psi_nodes.reserve(desc.size());
    for (const auto& node : desc) {
        phi_nodes.push_back({node.t, cvec{node.y[0]}, cvec{node.f[0]}});
        psi_nodes.push_back({node.t, psi_of(node.y), psi_of(node.f)});
    }
    return RiccatiSolution(T, u, make_trajectory_from_backward(std::move(phi_nodes)),
                           make_trajectory_from_backward(std::move(psi_nodes)),
                           std::move(jump_log), err_accum);
}

cplx char_fn(const RiccatiSolution& sol, double s, const rvec& x) {
    if (s < 0.0 || s > sol.T()) throw OutOfDomain("char_fn: s outside [0, T]");
    if (x.size() != sol.psi(s).size()) throw OutOfDomain("char_fn: state has wrong dimension");
    return std::exp(sol.phi(s) + dot(x, sol.psi(s)));
}

SemiflowResiduals semiflow_check(const AffineParameterSet& p, double T, const cvec& u, double r,
                                 const RiccatiOptions& opt_in) {
    if (r < 0.0 || r > T) throw OutOfDomain("semiflow_check: r outside [0, T]");
    // both sides of the identity carry solver error; run tighter than asked
    RiccatiOptions opt = opt_in;
    opt.abs_tol *= 0.1;
    opt.rel_tol *= 0.1;
    const RiccatiSolution full = solve_backward(p, T, u, opt);
    const cvec v = full.psi(r);
    const cplx phi_r = full.phi(r);
    const RiccatiSolution head = solve_backward(p, r, v, opt);

    SemiflowResiduals res{0.0, 0.0};
    auto probe = [&](double s) {
        const cplx lhs_phi = full.phi(s);
        const cplx rhs_phi = phi_r + head.phi(s);
        res.phi = std::max(res.phi, std::abs(lhs_phi - rhs_phi));
        const cvec lhs_psi = full.psi(s);
        const cvec rhs_psi = head.psi(s);
        double dp = 0.0;
        for (std::size_t k = 0; k < lhs_psi.size(); ++k)
            dp = std::max(dp, std::abs(lhs_psi[k] - rhs_psi[k]));
        res.psi = std::max(res.psi, dp);
    };
    for (double s : head.phi_trajectory().breakpoints()) probe(s);
    const int extra = 29;
    for (int i = 0; i <= extra; ++i) probe(r * i / extra);
    return res;
}

ConservativenessReport conservativeness_check(const AffineParameterSet& p, double T,
                                              const RiccatiOptions& opt) {
    ConservativenessReport rep;
    const std::size_t m = p.shape().m, d = p.shape().d();
    if (m == 0) {
        rep.verdict = ConservativenessReport::Verdict::Conservative;
        rep.detail = "no nonnegative coordinates: criterion vacuous";
        return rep;
    }

    try {
        // Exact solve at u = 0 must stay identically zero.
        const cvec zero(d, cplx{0.0, 0.0});
        const RiccatiSolution sol0 = solve_backward(p, T, zero, opt);
        double res0 = 0.0;
        for (const auto& node : sol0.phi_trajectory().nodes())
            res0 = std::max(res0, std::abs(node.value[0]));
        for (const auto& node : sol0.psi_trajectory().nodes())
            res0 = std::max(res0, norm_inf(node.value));
        rep.zero_residual = res0;

        bool contracts = true;
        for (double eps : {1e-6, 1e-4}) {
            cvec u(d, cplx{0.0, 0.0});
            for (std::size_t k = 0; k < m; ++k) u[k] = cplx{-eps, 0.0};
            const RiccatiSolution sol = solve_backward(p, T, u, opt);
            double worst = 0.0;
            for (const auto& node : sol.psi_trajectory().nodes()) {
                double g = 0.0;
                for (std::size_t k = 0; k < m; ++k) g = std::max(g, std::abs(node.value[k]));
                worst = std::max(worst, g);
            }
            rep.probe_expansion.push_back(worst / eps);
            if (worst > eps * (1.0 + 1e-6) + 1e-14) contracts = false;
        }

        if (res0 <= 1e-12 && contracts) {
            rep.verdict = ConservativenessReport::Verdict::Conservative;
            rep.detail = "g=0 residual vanishes and perturbed starts do not expand";
        } else {
            rep.verdict = ConservativenessReport::Verdict::Inconclusive;
            rep.detail = res0 > 1e-12 ? "nonzero residual of the exact zero solve"
                                      : "perturbed solutions expand away from 0";
        }
    } catch (const BlowUp& e) {
        rep.verdict = ConservativenessReport::Verdict::BlowUpDetected;
        rep.detail = std::string("perturbed solve blew up: ") + e.what();
    } catch (const DomainExit& e) {
        rep.verdict = ConservativenessReport::Verdict::Inconclusive;
        rep.detail = std::string("perturbed solve left the domain: ") + e.what();
    }
    return rep;
}

}  // namespace ajk
