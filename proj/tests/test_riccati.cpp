#include <cmath>
#include <cstring>
#include <random>

#include "ajk/errors.hpp"
#include "ajk/models.hpp"
#include "ajk/riccati.hpp"
#include "doctest.h"

using namespace ajk;

namespace {

// Independent reference: classical fixed-step RK4 on the joint system,
// backward in time, atoms handled by the same jump equations.
std::pair<cplx, cvec> rk4_reference(const AffineParameterSet& p, double T, const cvec& u,
                                    int steps) {
    const std::size_t d = p.shape().d();
    cplx phi{0.0, 0.0};
    cvec psi = u;
    auto deriv = [&](double t, const cvec& ps, cplx& dphi, cvec& dpsi) {
        const double a = p.driver().density(t);
        dphi = -a * p.F_eval(t, ps);
        dpsi = p.R_eval(t, ps);
        for (auto& v : dpsi) v *= -a;
    };
    std::vector<Atom> atoms = p.driver().atoms_in(-1.0, T);
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t > b.t; });
    double hi = T;
    auto run = [&](double lo, double up) {
        if (!(up > lo)) return;
        const int n = std::max(1, static_cast<int>(std::ceil(steps * (up - lo))));
        const double h = -(up - lo) / n;
        double t = up;
        for (int k = 0; k < n; ++k) {
            cplx k1p, k2p, k3p, k4p;
            cvec k1(d), k2(d), k3(d), k4(d), tmp(d);
            deriv(t, psi, k1p, k1);
            for (std::size_t i = 0; i < d; ++i) tmp[i] = psi[i] + 0.5 * h * k1[i];
            deriv(t + 0.5 * h, tmp, k2p, k2);
            for (std::size_t i = 0; i < d; ++i) tmp[i] = psi[i] + 0.5 * h * k2[i];
            deriv(t + 0.5 * h, tmp, k3p, k3);
            for (std::size_t i = 0; i < d; ++i) tmp[i] = psi[i] + h * k3[i];
            deriv(t + h, tmp, k4p, k4);
            for (std::size_t i = 0; i < d; ++i)
                psi[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            phi += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            t += h;
        }
    };
    for (const auto& atom : atoms) {
        run(atom.t, hi);
        auto [g0, gbar] = p.gamma_eval(atom.t, psi);
        phi += g0;
        for (std::size_t i = 0; i < d; ++i) psi[i] += gbar[i];
        hi = atom.t;
    }
    run(0.0, hi);
    return {phi, psi};
}

}  // namespace

TEST_CASE("solve_backward: homogeneous Poisson closed form") {
    const double lambda = 1.2;
    const auto model = poisson_process(lambda, 3.0);
    const cvec u{cplx{0.0, 0.8}};
    const auto sol = solve_backward(model.params, 1.5, u);
    for (double s : {0.0, 0.3, 0.9, 1.5}) {
        const cplx expect = lambda * (1.5 - s) * (std::exp(u[0]) - 1.0);
        CHECK(std::abs(sol.phi(s) - expect) < 1e-10);
        CHECK(std::abs(sol.psi(s)[0] - u[0]) < 1e-12);
    }
}

TEST_CASE("solve_backward: zero parameters") {
    const auto model = zero_model(1, 1, 2.0);
    const cvec u{cplx{-0.3, 0.5}, cplx{0.0, -1.0}};
    const auto sol = solve_backward(model.params, 2.0, u);
    for (double s : {0.0, 0.77, 2.0}) {
        CHECK(std::abs(sol.phi(s)) == 0.0);
        CHECK(std::abs(sol.psi(s)[0] - u[0]) < 1e-15);
        CHECK(std::abs(sol.psi(s)[1] - u[1]) < 1e-15);
    }
}

TEST_CASE("solve_backward: Poisson with normal jump at tau, composed closed form") {
    const double lambda = 1.0, tau = 1.0, T = 2.0;
    const auto model = poisson_with_normal_jump(lambda, tau, 3.0);
    const cplx u{0.0, 0.8};
    const auto sol = solve_backward(model.params, T, {u});

    // s in [tau, T]: plain Poisson
    CHECK(std::abs(sol.phi(1.5) - lambda * 0.5 * (std::exp(u) - 1.0)) < 1e-10);
    CHECK(std::abs(sol.psi(1.5)[0] - u) < 1e-12);

    // s < tau: psi = u + u^2/2, phi gains log cosh u and the inner Poisson
    // runs at the post-jump argument
    const cplx psi_jump = u + 0.5 * u * u;
    for (double s : {0.0, 0.5}) {
        const cplx expect_phi = lambda * (T - tau) * (std::exp(u) - 1.0) +
                                std::log(std::cosh(u)) +
                                lambda * (tau - s) * (std::exp(psi_jump) - 1.0);
        CHECK(std::abs(sol.phi(s) - expect_phi) < 1e-10);
        CHECK(std::abs(sol.psi(s)[0] - psi_jump) < 1e-12);
    }
    // left limit at tau already carries the jump
    CHECK(std::abs(sol.psi_left(tau)[0] - psi_jump) < 1e-12);
    CHECK(std::abs(sol.psi(tau)[0] - u) < 1e-12);
}

TEST_CASE("solve_backward: Vasicek against a 10x-resolution RK4 reference") {
    const auto model = vasicek(0.01, -0.5, 0.2, 3.0);
    const cvec u{cplx{0.0, 1.0}};
    const auto sol = solve_backward(model.params, 1.0, u);
    const auto [phi_ref, psi_ref] = rk4_reference(model.params, 1.0, u, 20000);
    CHECK(std::abs(sol.phi(0.0) - phi_ref) < 1e-9);
    CHECK(std::abs(sol.psi(0.0)[0] - psi_ref[0]) < 1e-9);
}

TEST_CASE("solve_backward: atom exactly at T is processed first") {
    const auto model = poisson_with_normal_jump(1.0, 1.0, 3.0);
    const cplx u{0.0, 0.6};
    const auto sol = solve_backward(model.params, 1.0, {u});
    // terminal values at T(=tau) keep the terminal condition; the left limit
    // carries the transform
    CHECK(std::abs(sol.phi(1.0)) == 0.0);
    CHECK(std::abs(sol.psi(1.0)[0] - u) == 0.0);
    CHECK(std::abs(sol.psi_left(1.0)[0] - (u + 0.5 * u * u)) < 1e-14);
    CHECK(sol.jump_log().size() == 1);
}

TEST_CASE("char_fn examples") {
    const auto zero = zero_model(0, 1, 2.0);
    const cvec u{cplx{0.0, 0.9}};
    const auto sol0 = solve_backward(zero.params, 2.0, u);
    CHECK(std::abs(char_fn(sol0, 1.3, {2.0}) - std::exp(u[0] * 2.0)) < 1e-14);

    const double lambda = 1.1, T = 1.4;
    const auto pois = poisson_process(lambda, 3.0);
    const auto sol1 = solve_backward(pois.params, T, u);
    CHECK(std::abs(char_fn(sol1, T, {3.0}) - std::exp(u[0] * 3.0)) < 1e-13);
    const cplx expect = std::exp(lambda * T * (std::exp(u[0]) - 1.0));
    CHECK(std::abs(char_fn(sol1, 0.0, {0.0}) - expect) < 1e-10);

    CHECK_THROWS_AS((void)char_fn(sol1, -0.5, {0.0}), OutOfDomain);
    CHECK_THROWS_AS((void)char_fn(sol1, 2.0, {0.0}), OutOfDomain);
}

TEST_CASE("char_fn modulus stays below one on sampled states") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const auto models = {poisson_process(1.0, 3.0), vasicek(0.01, -0.5, 0.2, 3.0),
                         cir_type(0.8, 0.3, 0.2, 3.0),
                         discontinuous_vasicek(0.01, -0.5, 0.2, 0.3, {0.7}, 3.0)};
    for (const auto& model : models) {
        const std::size_t m = model.shape().m, d = model.shape().d();
        for (int trial = 0; trial < 10; ++trial) {
            cvec u(d);
            for (std::size_t k = 0; k < d; ++k)
                u[k] = k < m ? cplx{-unif(rng), 2.0 * (unif(rng) - 0.5)}
                             : cplx{0.0, 2.0 * (unif(rng) - 0.5)};
            const double T = 0.5 + 2.0 * unif(rng);
            const auto sol = solve_backward(model.params, T, u);
            for (int q = 0; q < 5; ++q) {
                const double s = T * unif(rng);
                rvec x(d);
                for (std::size_t k = 0; k < d; ++k)
                    x[k] = k < m ? 2.0 * unif(rng) : 3.0 * (unif(rng) - 0.5);
                CHECK(std::abs(char_fn(sol, s, x)) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("semiflow_check examples") {
    const auto zero = zero_model(1, 1, 2.0);
    const cvec u0{cplx{-0.3, 0.4}, cplx{0.0, 0.6}};
    const auto r0 = semiflow_check(zero.params, 2.0, u0, 1.0);
    CHECK(r0.phi == 0.0);
    CHECK(r0.psi == 0.0);

    const auto pois = poisson_process(1.0, 3.0);
    const auto r1 = semiflow_check(pois.params, 2.0, {cplx{0.0, 0.9}}, 1.0);
    CHECK(r1.phi < 1e-9);
    CHECK(r1.psi < 1e-9);

    // restart on either side of the atom, and exactly on it
    const auto pj = poisson_with_normal_jump(1.0, 1.0, 3.0);
    for (double r : {0.7, 1.0, 1.3}) {
        const auto res = semiflow_check(pj.params, 2.0, {cplx{0.0, 0.8}}, r);
        CHECK(res.phi < 1e-9);
        CHECK(res.psi < 1e-9);
    }
}

TEST_CASE("psi stays in U along trajectories") {
    const auto cir = cir_type(0.8, 0.3, 0.2, 3.0);
    const auto sol = solve_backward(cir.params, 2.5, {cplx{-1.2, 0.7}});
    for (const auto& node : sol.psi_trajectory().nodes())
        CHECK(node.value[0].real() <= 1e-10);

    const auto vas = vasicek(0.01, -0.5, 0.2, 3.0);
    const auto solv = solve_backward(vas.params, 2.5, {cplx{0.0, 0.7}});
    for (const auto& node : solv.psi_trajectory().nodes())
        CHECK(std::abs(node.value[0].real()) <= 1e-10);
}

TEST_CASE("u = 0 gives identically zero solutions") {
    for (const auto& model :
         {poisson_process(1.0, 3.0), cir_type(0.8, 0.3, 0.2, 3.0),
          discontinuous_vasicek(0.01, -0.5, 0.2, 0.3, {0.7, 1.4}, 3.0)}) {
        const cvec zero(model.shape().d(), cplx{0.0, 0.0});
        const auto sol = solve_backward(model.params, 2.0, zero);
        for (const auto& node : sol.phi_trajectory().nodes()) CHECK(std::abs(node.value[0]) == 0.0);
        for (const auto& node : sol.psi_trajectory().nodes()) CHECK(norm_inf(node.value) == 0.0);
    }
}

TEST_CASE("solver determinism: identical inputs, bit-identical trajectories") {
    const auto model = discontinuous_vasicek(0.01, -0.5, 0.2, 0.3, {0.7}, 3.0);
    const cvec u{cplx{0.0, 1.1}};
    const auto a = solve_backward(model.params, 2.0, u);
    const auto b = solve_backward(model.params, 2.0, u);
    REQUIRE(a.phi_trajectory().nodes().size() == b.phi_trajectory().nodes().size());
    for (std::size_t i = 0; i < a.phi_trajectory().nodes().size(); ++i) {
        const auto& na = a.phi_trajectory().nodes()[i];
        const auto& nb = b.phi_trajectory().nodes()[i];
        CHECK(na.t == nb.t);
        CHECK(std::memcmp(na.value.data(), nb.value.data(), sizeof(cplx)) == 0);
    }
}

TEST_CASE("refinement convergence against the reported error estimate") {
    const auto model = vasicek(0.01, -0.5, 0.2, 3.0);
    const cvec u{cplx{0.0, 1.0}};
    RiccatiOptions coarse;
    const auto sol = solve_backward(model.params, 2.0, u, coarse);
    RiccatiOptions fine = coarse;
    fine.abs_tol *= 0.5;
    fine.rel_tol *= 0.5;
    const auto ref = solve_backward(model.params, 2.0, u, fine);
    CHECK(std::abs(sol.phi(0.0) - ref.phi(0.0)) <
          10.0 * std::max(sol.error_estimate(), 1e-15));
}

TEST_CASE("BlowUp reported for an explosive drift fixture") {
    StateSpaceShape sh{1, 0};
    auto betas = zero_betas(1);
    betas[1] = const_vec({40.0});
    AffineParameterSet p(sh, DriverMeasure::lebesgue(1.0), std::move(betas), zero_alphas(1),
                         empty_mus(1), {});
    CHECK_THROWS_AS((void)solve_backward(p, 1.0, {cplx{-1.0, 0.0}}), BlowUp);
}

TEST_CASE("DomainExit reported when Re psi escapes the cone") {
    StateSpaceShape sh{2, 0};
    auto betas = zero_betas(2);
    betas[1] = const_vec({0.0, -5.0});  // inadmissible inward drift
    AffineParameterSet p(sh, DriverMeasure::lebesgue(2.0), std::move(betas), zero_alphas(2),
                         empty_mus(2), {});
    CHECK_THROWS_AS((void)solve_backward(p, 1.5, {cplx{-1e-3, 0.0}, cplx{-1e-3, 0.0}}),
                    DomainExit);
}

TEST_CASE("conservativeness_check verdicts") {
    const auto vas = vasicek(0.01, -0.5, 0.2, 3.0);
    const auto rv = conservativeness_check(vas.params, 2.0);
    CHECK(rv.verdict == ConservativenessReport::Verdict::Conservative);

    const auto zero = zero_model(1, 0, 3.0);
    CHECK(conservativeness_check(zero.params, 2.0).verdict ==
          ConservativenessReport::Verdict::Conservative);

    const auto cir = cir_type(0.8, 0.3, 0.2, 3.0);
    const auto rc = conservativeness_check(cir.params, 2.5);
    CHECK(rc.verdict == ConservativenessReport::Verdict::Conservative);
    CHECK(rc.zero_residual == 0.0);
    CHECK(rc.verdict_string() == "conservative (numerically)");

    // the perturbed solves trace the analytic solution of the scalar
    // logistic-type equation, which is the CIR psi at real u
    {
        const double eps = 1e-4;
        const auto sol = solve_backward(cir.params, 2.5, {cplx{-eps, 0.0}});
        const auto cf = (*cir.closed_form)(0.7, 2.5, {cplx{-eps, 0.0}});
        CHECK(std::abs(sol.psi(0.7)[0] - cf.second[0]) < 1e-10);
    }

    // explosive fixture: strong outward drift
    StateSpaceShape sh{1, 0};
    auto betas = zero_betas(1);
    betas[1] = const_vec({40.0});
    AffineParameterSet p(sh, DriverMeasure::lebesgue(1.0), std::move(betas), zero_alphas(1),
                         empty_mus(1), {});
    const auto re = conservativeness_check(p, 1.0);
    CHECK(re.verdict == ConservativenessReport::Verdict::BlowUpDetected);
}
