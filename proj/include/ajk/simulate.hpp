#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ajk/models.hpp"
#include "ajk/riccati.hpp"

namespace ajk {

// Monte Carlo ensemble on a fixed time grid that contains every atom of the
// driver. States are cadlag: grid values at atom times are post-jump.
struct PathEnsemble {
    std::string model_name;
    std::size_t dim = 0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> grid;
    std::vector<double> states;  // [path][grid][coord], flattened
    std::size_t domain_exit_count = 0;

    double state(std::size_t path, std::size_t k, std::size_t coord) const {
        return states[(path * grid.size() + k) * dim + coord];
    }
    rvec state_vec(std::size_t path, std::size_t k) const {
        rvec x(dim);
        for (std::size_t c = 0; c < dim; ++c) x[c] = state(path, k, c);
        return x;
    }
    std::size_t grid_index(double t) const;

    // Columnar CSV: t, path_id, x_1..x_d.
    void to_csv(std::ostream& os) const;
};

struct SimulateOptions {
    std::size_t grid_points = 64;  // uniform grid besides atoms and endpoints
    int threads = 1;
    double euler_dt = 1e-3;  // fixed Euler substep cap: min(1e-3, gap/100)
};

// Reproducible ensemble: path p draws from the counter-based stream
// (seed, p), so results are identical under any thread count.
PathEnsemble simulate(const ModelSpec& model, const rvec& x0, double T, std::size_t n_paths,
                      std::uint64_t seed, const SimulateOptions& opt = {});

struct CharFnEstimate {
    cplx estimate;
    double std_error;
};

// Estimate of E[e^{<u, X_T>} | X_s = x0]: the plain cross-sectional average
// at s = 0, and an affine regression on (1, X_s) predicted at x0 for s > 0.
// Needs at least 1000 paths.
CharFnEstimate empirical_charfn(const PathEnsemble& e, std::size_t s_index, const cvec& u);

struct CharFnComparison {
    struct Entry {
        cvec u;
        cplx solver_value;
        cplx mc_estimate;
        double std_error;
        double z;
    };
    std::vector<Entry> entries;
    double max_z = 0.0;
    bool pass = false;  // max_z <= 4
};

// Solver-versus-Monte-Carlo agreement on a grid of u values at s = 0.
CharFnComparison compare_charfn(const ModelSpec& model, const rvec& x0, double T,
                                const std::vector<cvec>& u_grid, std::size_t n_paths,
                                std::uint64_t seed, const SimulateOptions& opt = {});

struct MartingaleReport {
    std::vector<double> times;
    std::vector<double> z;
    double max_z = 0.0;
    bool pass = false;
};

// Flatness of the empirical mean of exp(phi_s + <psi_s, X_s>) along the
// grid; for a correct solver/simulator pair this process is a martingale.
MartingaleReport charfn_martingale_report(const ModelSpec& model, const PathEnsemble& e,
                                          double T, const cvec& u);

}  // namespace ajk
