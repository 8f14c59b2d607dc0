#include <cmath>
#include <sstream>

#include "ajk/errors.hpp"
#include "ajk/models.hpp"
#include "ajk/simulate.hpp"
#include "doctest.h"

using namespace ajk;

TEST_CASE("seed determinism: identical ensembles, any thread count") {
    const auto model = discontinuous_vasicek(0.01, -0.5, 0.2, 0.3, {0.7}, 3.0);
    SimulateOptions opt;
    opt.grid_points = 16;
    const auto a = simulate(model, {0.02}, 2.0, 64, 99, opt);
    opt.threads = 4;
    const auto b = simulate(model, {0.02}, 2.0, 64, 99, opt);
    CHECK(a.states == b.states);
    CHECK(a.grid == b.grid);
}

TEST_CASE("constant paths for the zero model") {
    const auto model = zero_model(0, 1, 3.0);
    const auto e = simulate(model, {0.7}, 2.0, 8, 1);
    for (std::size_t p = 0; p < e.n_paths; ++p)
        for (std::size_t k = 0; k < e.grid.size(); ++k) CHECK(e.state(p, k, 0) == 0.7);
}

TEST_CASE("Poisson ensemble mean near lambda T") {
    const std::size_t N = 20000;
    const auto model = poisson_process(1.0, 2.0);
    const auto e = simulate(model, {0.0}, 1.0, N, 7);
    double mean = 0.0;
    const std::size_t last = e.grid.size() - 1;
    for (std::size_t p = 0; p < N; ++p) mean += e.state(p, last, 0);
    mean /= static_cast<double>(N);
    CHECK(std::abs(mean - 1.0) < 3.0 / std::sqrt(static_cast<double>(N)));
}

TEST_CASE("grid contains every atom and jump variance matches gamma^2") {
    const double gamma = 0.4;
    const auto model = discontinuous_vasicek(0.0, -0.5, 0.0, gamma, {0.9}, 3.0);
    const std::size_t N = 20000;
    const auto e = simulate(model, {0.0}, 2.0, N, 11);
    const std::size_t k_atom = e.grid_index(0.9);
    REQUIRE(k_atom > 0);
    // sigma = 0: the only randomness at the atom is the shock itself
    double var = 0.0, mean = 0.0;
    std::vector<double> jumps(N);
    for (std::size_t p = 0; p < N; ++p) {
        // left limit: the OU decay of the previous grid value
        const double prev = e.state(p, k_atom - 1, 0);
        const double gap = e.grid[k_atom] - e.grid[k_atom - 1];
        const double left = prev * std::exp(-0.5 * gap);
        jumps[p] = e.state(p, k_atom, 0) - left;
        mean += jumps[p];
    }
    mean /= static_cast<double>(N);
    for (double j : jumps) var += (j - mean) * (j - mean);
    var /= static_cast<double>(N - 1);
    const double se = gamma * gamma * std::sqrt(2.0 / static_cast<double>(N - 1));
    CHECK(std::abs(var - gamma * gamma) < 4.0 * se);
}

TEST_CASE("exact simulation keeps nonnegative models inside D") {
    const auto dp = discrete_poisson({0.4, 0.6, 0.5});
    const auto e = simulate(dp, {2.0}, 3.0, 500, 3);
    for (double v : e.states) CHECK(v >= 0.0);
    CHECK(e.domain_exit_count == 0);

    // CIR runs through the Euler fallback with full truncation
    const auto cir = cir_type(0.8, 0.3, 0.2, 2.0);
    SimulateOptions opt;
    opt.grid_points = 8;
    opt.euler_dt = 5e-3;
    const auto ec = simulate(cir, {0.15}, 1.0, 200, 5, opt);
    for (double v : ec.states) CHECK(v >= 0.0);
}

TEST_CASE("CIR Euler fallback tracks the closed-form mean") {
    const double kappa = 0.8, a0 = 0.2, x0 = 0.15, T = 1.0;
    const auto cir = cir_type(kappa, 0.35, a0, 2.0);
    SimulateOptions opt;
    opt.grid_points = 4;
    const std::size_t N = 4000;
    const auto e = simulate(cir, {x0}, T, N, 13, opt);
    double mean = 0.0;
    const std::size_t last = e.grid.size() - 1;
    for (std::size_t p = 0; p < N; ++p) mean += e.state(p, last, 0);
    mean /= static_cast<double>(N);
    const double exact = x0 * std::exp(-kappa * T) + a0 / kappa * (1.0 - std::exp(-kappa * T));
    CHECK(std::abs(mean - exact) < 0.01);
}

TEST_CASE("empirical_charfn: examples") {
    // deterministic model: estimate exact, standard error zero
    const auto zero = zero_model(0, 1, 2.0);
    const auto ez = simulate(zero, {0.5}, 1.0, 1000, 2);
    const cvec u{cplx{0.0, 0.8}};
    const auto est = empirical_charfn(ez, 0, u);
    CHECK(std::abs(est.estimate - std::exp(u[0] * 0.5)) < 1e-13);
    CHECK(est.std_error <= 1e-14);

    // u = 0 -> (1, 0)
    const auto e0 = empirical_charfn(ez, 0, {cplx{0.0, 0.0}});
    CHECK(e0.estimate == cplx{1.0, 0.0});
    CHECK(e0.std_error <= 1e-14);

    CHECK_THROWS_AS((void)empirical_charfn(simulate(zero, {0.5}, 1.0, 10, 2), 0, u),
                    InsufficientPaths);

    // Poisson at s = 0 within 3 standard errors of the closed form
    const auto pois = poisson_process(1.0, 2.0);
    const auto ep = simulate(pois, {0.0}, 1.0, 20000, 17);
    const auto pe = empirical_charfn(ep, 0, {cplx{0.0, 1.0}});
    const cplx exact = std::exp(1.0 * (std::exp(cplx{0.0, 1.0}) - 1.0));
    CHECK(std::abs(pe.estimate - exact) < 3.0 * pe.std_error);
}

TEST_CASE("empirical_charfn: regression conditioning at s > 0") {
    const auto model = vasicek(0.01, -0.5, 0.2, 3.0);
    const std::size_t N = 40000;
    SimulateOptions opt;
    opt.grid_points = 8;
    const auto e = simulate(model, {0.05}, 2.0, N, 23, opt);
    const cvec u{cplx{0.0, 0.6}};
    const std::size_t sk = e.grid_index(1.0);
    const auto est = empirical_charfn(e, sk, u);
    // oracle: E[e^{u X_T} | X_1 = x0] from the closed form
    const auto cf = (*model.closed_form)(1.0, 2.0, u);
    const cplx exact = std::exp(cf.first + cf.second[0] * 0.05);
    CHECK(std::abs(est.estimate - exact) < 4.0 * est.std_error + 2e-3);
}

TEST_CASE("compare_charfn: zero model and Poisson grid") {
    const auto zero = zero_model(0, 1, 2.0);
    const auto rep = compare_charfn(zero, {0.3}, 1.0, {{cplx{0.0, 0.5}}, {cplx{0.0, 1.5}}},
                                    1000, 31);
    CHECK(rep.pass);
    CHECK(rep.max_z < 1.0);

    std::vector<cvec> grid;
    for (int k = 1; k <= 5; ++k) grid.push_back({cplx{0.0, 0.2 * k}});
    const auto pois = poisson_process(1.0, 2.0);
    SimulateOptions opt;
    opt.threads = 2;
    const auto rp = compare_charfn(pois, {0.0}, 1.0, grid, 20000, 37, opt);
    CHECK(rp.pass);
}

TEST_CASE("martingale flatness of the solved characteristic exponent") {
    const auto model = discontinuous_vasicek(0.01, -0.5, 0.2, 0.3, {0.8}, 3.0);
    SimulateOptions opt;
    opt.grid_points = 10;
    const auto e = simulate(model, {0.04}, 2.0, 20000, 41, opt);
    const auto rep = charfn_martingale_report(model, e, 2.0, {cplx{0.0, 0.9}});
    CHECK(rep.pass);
}

TEST_CASE("ensemble CSV export shape") {
    const auto model = poisson_process(1.0, 2.0);
    SimulateOptions opt;
    opt.grid_points = 4;
    const auto e = simulate(model, {0.0}, 1.0, 2, 1, opt);
    std::ostringstream os;
    e.to_csv(os);
    const std::string s = os.str();
    CHECK(s.rfind("t,path_id,x_1", 0) == 0);
    std::size_t lines = 0;
    for (char c : s)
        if (c == '\n') ++lines;
    CHECK(lines == 1 + 2 * e.grid.size());
}
