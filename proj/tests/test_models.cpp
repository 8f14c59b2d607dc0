#include <cmath>
#include <random>

#include "ajk/admissibility.hpp"
#include "ajk/errors.hpp"
#include "ajk/models.hpp"
#include "ajk/riccati.hpp"
#include "doctest.h"

using namespace ajk;

namespace {

cvec random_u(std::mt19937& rng, const StateSpaceShape& sh, double span = 1.4) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    cvec u(sh.d());
    for (std::size_t k = 0; k < sh.d(); ++k)
        u[k] = k < sh.m ? cplx{-span * unif(rng), span * (2.0 * unif(rng) - 1.0)}
                        : cplx{0.0, span * (2.0 * unif(rng) - 1.0)};
    return u;
}

std::vector<ModelSpec> default_catalog() {
    std::vector<ModelSpec> out;
    out.push_back(zero_model(1, 1, 4.0));
    out.push_back(poisson_process(1.1, 4.0));
    out.push_back(poisson_with_normal_jump(1.0, 1.0, 4.0));
    out.push_back(discrete_poisson({0.3, 0.55, 0.7, 0.2}));
    out.push_back(vasicek(0.01, -0.5, 0.2, 4.0));
    out.push_back(cir_type(0.8, 0.3, 0.2, 4.0));
    out.push_back(discontinuous_vasicek(0.01, -0.5, 0.2, 0.3, {0.6, 1.7}, 4.0));
    auto logcf = [](const cplx& u) { return 0.5 * 0.25 * u * u; };
    out.push_back(ar1_embed({0.8, 0.8, 0.8, 0.8}, logcf,
                            [](Rng& rng) { return rng.normal(0.0, 0.5); }));
    return out;
}

}  // namespace

TEST_CASE("discrete_poisson: closed form and parameter validation") {
    CHECK_THROWS_AS(discrete_poisson({0.3, 1.2}), InvalidParameter);
    CHECK_THROWS_AS(discrete_poisson({0.0}), InvalidParameter);

    const double p = 0.4;
    const auto model = discrete_poisson({p, p, p});
    const cplx u{0.0, 0.9};
    auto [phi, psi] = (*model.closed_form)(0.0, 2.0, {u});
    const cplx expect = 2.0 * (u + std::log(p + std::exp(-u) * (1.0 - p)));
    CHECK(std::abs(phi - expect) < 1e-14);
    CHECK(std::abs(psi[0] - u) == 0.0);

    auto [z, zp] = (*model.closed_form)(0.0, 2.0, {cplx{0.0, 0.0}});
    CHECK(std::abs(z) == 0.0);

    // direct complex arithmetic oracle at p_1 = 0.3, u = i
    const auto m2 = discrete_poisson({0.3, 0.5});
    const cplx ui{0.0, 1.0};
    auto [p1, unused] = (*m2.closed_form)(0.0, 1.0, {ui});
    const cplx oracle = ui + std::log(cplx{0.3, 0.0} + std::exp(-ui) * 0.7);
    CHECK(std::abs(p1 - oracle) < 1e-15);
}

TEST_CASE("poisson_with_normal_jump: indicator logic of the closed form") {
    const auto model = poisson_with_normal_jump(1.3, 2.0, 5.0);
    const cplx u{0.0, 0.7};

    auto [phi_a, psi_a] = (*model.closed_form)(0.5, 3.0, {u});
    CHECK(std::abs(psi_a[0] - (u + 0.5 * u * u)) < 1e-15);

    // tau > t: plain Poisson
    auto [phi_b, psi_b] = (*model.closed_form)(0.5, 1.5, {u});
    CHECK(std::abs(phi_b - 1.3 * (std::exp(u) - 1.0)) < 1e-14);
    CHECK(std::abs(psi_b[0] - u) == 0.0);

    auto [z0, zb] = (*model.closed_form)(0.0, 3.0, {cplx{0.0, 0.0}});
    CHECK(std::abs(z0) == 0.0);
    CHECK(std::abs(zb[0]) == 0.0);

    CHECK(model.violates_support_condition);
    CHECK_THROWS_AS(poisson_with_normal_jump(-1.0, 1.0), InvalidParameter);
}

TEST_CASE("vasicek: degenerate and closed-form checks") {
    CHECK_THROWS_AS(vasicek(0.0, 0.0, 0.2), InvalidParameter);

    const auto pure = vasicek(0.0, -0.7, 0.0, 4.0);
    const cplx u{0.0, 1.3};
    auto [phi, psi] = (*pure.closed_form)(1.0, 3.0, {u});
    CHECK(std::abs(phi) < 1e-18);
    CHECK(std::abs(psi[0] - u * std::exp(-0.7 * 2.0)) < 1e-15);

    auto [z0, zb] = (*pure.closed_form)(0.0, 2.0, {cplx{0.0, 0.0}});
    CHECK(std::abs(z0) == 0.0);
    CHECK(std::abs(zb[0]) == 0.0);
}

TEST_CASE("discontinuous_vasicek: small gamma degenerates to vasicek") {
    const auto vas = vasicek(0.01, -0.5, 0.2, 4.0);
    const auto disc = discontinuous_vasicek(0.01, -0.5, 0.2, 1e-8, {1.0}, 4.0);
    const cplx u{0.0, 1.0};
    auto [pv, sv] = (*vas.closed_form)(0.0, 2.0, {u});
    auto [pd, sd] = (*disc.closed_form)(0.0, 2.0, {u});
    CHECK(std::abs(pv - pd) < 1e-14);
    CHECK(std::abs(sv[0] - sd[0]) == 0.0);

    CHECK_THROWS_AS(discontinuous_vasicek(0.0, -0.5, 0.2, 0.1, {1.5, 1.0}), InvalidParameter);
}

TEST_CASE("discontinuous_vasicek: char fn against the exact Gaussian-OU oracle") {
    const double alpha = 0.02, beta = -0.6, sigma = 0.25, gamma = 0.35, t1 = 1.2;
    const auto model = discontinuous_vasicek(alpha, beta, sigma, gamma, {t1}, 4.0);
    const double T = 2.0, s = 0.4, x = 0.03, theta = 0.9;

    const auto sol = solve_backward(model.params, T, {cplx{0.0, theta}});
    const cplx got = char_fn(sol, s, {x});

    // r_T | r_s is Gaussian: OU moments plus the propagated shock variance
    const double tau = T - s;
    const double mean = std::exp(beta * tau) * x + alpha * (std::exp(beta * tau) - 1.0) / beta;
    const double var = sigma * sigma * (std::exp(2.0 * beta * tau) - 1.0) / (2.0 * beta) +
                       gamma * gamma * std::exp(2.0 * beta * (T - t1));
    const cplx oracle = std::exp(cplx{-0.5 * theta * theta * var, theta * mean});
    CHECK(std::abs(got - oracle) < 1e-9);
}

TEST_CASE("cir_type: degenerate diffusion and zero argument") {
    const auto pure = cir_type(0.9, 0.0, 0.1, 4.0);
    const cplx u{-0.8, 0.3};
    auto [phi, psi] = (*pure.closed_form)(0.0, 2.0, {u});
    CHECK(std::abs(psi[0] - u * std::exp(-0.9 * 2.0)) < 1e-15);

    auto [z0, zb] = (*cir_type(0.8, 0.3, 0.2).closed_form)(0.0, 2.0, {cplx{0.0, 0.0}});
    CHECK(std::abs(z0) == 0.0);
    CHECK(std::abs(zb[0]) == 0.0);
}

TEST_CASE("ar1_embed: identity, Gaussian recursion oracle, one pure-noise step") {
    auto zero_cf = [](const cplx&) { return cplx{0.0, 0.0}; };
    const auto ident = ar1_embed({1.0, 1.0, 1.0}, zero_cf);
    const cplx u{0.0, 0.8};
    auto [phi, psi] = (*ident.closed_form)(0.0, 3.0, {u});
    CHECK(std::abs(phi) == 0.0);
    CHECK(std::abs(psi[0] - u) == 0.0);

    // Gaussian noise: phi_0(n,u) = sigma^2 u^2 / 2 * sum a^{2k}, psi = a^n u
    const double a = 0.6, se = 0.4;
    auto logcf = [se](const cplx& v) { return 0.5 * se * se * v * v; };
    const auto model = ar1_embed({a, a, a, a, a, a, a, a, a, a}, logcf);
    for (int n : {1, 3, 7, 10}) {
        cplx sum{0.0, 0.0};
        for (int k = 0; k < n; ++k) sum += std::pow(a, 2.0 * k);
        const cplx expect_phi = 0.5 * se * se * u * u * sum;
        const cplx expect_psi = std::pow(a, n) * u;
        auto [p, s] = (*model.closed_form)(0.0, static_cast<double>(n), {u});
        CHECK(std::abs(p - expect_phi) < 1e-14);
        CHECK(std::abs(s[0] - expect_psi) < 1e-14);
    }

    const auto one = ar1_embed({0.0}, logcf);
    auto [pn, sn] = (*one.closed_form)(0.0, 1.0, {u});
    CHECK(std::abs(pn - logcf(u)) == 0.0);
    CHECK(std::abs(sn[0]) == 0.0);

    auto bad = [](const cplx&) { return cplx{0.5, 0.0}; };
    CHECK_THROWS_AS(ar1_embed({0.5}, bad), InvalidParameter);
}

TEST_CASE("solver matches every catalog closed form at random triples") {
    std::mt19937 rng(90210);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const auto& model : default_catalog()) {
        REQUIRE(model.closed_form.has_value());
        const double hmax = model.driver().horizon();
        for (int trial = 0; trial < 50; ++trial) {
            const double T = hmax * (0.2 + 0.8 * unif(rng));
            const double s = T * unif(rng);
            const cvec u = random_u(rng, model.shape());
            const auto sol = solve_backward(model.params, T, u);
            const auto [phi_cf, psi_cf] = (*model.closed_form)(s, T, u);
            CHECK(std::abs(sol.phi(s) - phi_cf) < 1e-8);
            for (std::size_t k = 0; k < u.size(); ++k)
                CHECK(std::abs(sol.psi(s)[k] - psi_cf[k]) < 1e-8);
        }
    }
}

TEST_CASE("catalog models with nonnegative coordinates pass admissibility") {
    for (const auto& model : default_catalog()) {
        if (model.shape().m == 0) continue;
        CHECK(check_admissible(model.params).admissible());
    }
}

TEST_CASE("discrete-time models reproduce the difference-equation recursion") {
    // phi_n(n+1) = F(n,u), psi_n(n+1,u) = u + R(n,u),
    // phi_n(m+1,u) = F(m,u) + phi_n(m, u + R(m,u)),
    // psi_n(m+1,u) = psi_n(m, u + R(m,u)).
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const std::vector<double> p{0.3, 0.55, 0.7, 0.2, 0.45};
    const auto dp = discrete_poisson(p);
    auto F_dp = [&](int n, const cplx& u) {
        return u + std::log(p[n] + std::exp(-u) * (1.0 - p[n]));
    };
    auto R_dp = [&](int, const cplx&) { return cplx{0.0, 0.0}; };

    const double a = 0.7, se = 0.5;
    auto logcf = [se](const cplx& v) { return 0.5 * se * se * v * v; };
    const auto ar = ar1_embed({a, a, a, a, a}, logcf);
    auto F_ar = [&](int, const cplx& u) { return logcf(u); };
    auto R_ar = [&](int, const cplx& u) { return (a - 1.0) * u; };

    auto run = [&](const ModelSpec& model, auto F, auto R) {
        for (int trial = 0; trial < 8; ++trial) {
            const cplx u{0.0, 2.0 * unif(rng) - 1.0};
            for (int m = 1; m <= 5; ++m) {
                // recursion forward in the horizon index
                cplx phi{0.0, 0.0}, psi = u;
                for (int step = m - 1; step >= 0; --step) {
                    // one-step composition: phi_0(k+1) through F/R at index k
                    const cplx r = R(step, psi);
                    phi = F(step, psi) + phi;
                    psi = psi + r;
                }
                const auto sol = solve_backward(model.params, static_cast<double>(m), u.real() == 0.0 ? cvec{u} : cvec{u});
                CHECK(std::abs(sol.phi(0.0) - phi) < 1e-12);
                CHECK(std::abs(sol.psi(0.0)[0] - psi) < 1e-12);
            }
        }
    };
    run(dp, F_dp, R_dp);
    run(ar, F_ar, R_ar);
}
