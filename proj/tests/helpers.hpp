#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "ajk/driver_measure.hpp"
#include "ajk/types.hpp"

namespace ajk::testing {

// Random driver: 1-3 polynomial density segments tiling [0, horizon] and up
// to max_atoms atoms strictly inside (0, horizon].
inline DriverMeasure random_driver(std::mt19937& rng, double horizon, int max_atoms,
                                   bool allow_zero_density = false) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> nseg_d(1, 3);
    const int nseg = nseg_d(rng);

    std::vector<double> edges{0.0};
    for (int i = 1; i < nseg; ++i) edges.push_back(horizon * (i + 0.3 * unif(rng)) / nseg);
    edges.push_back(horizon);

    std::vector<PiecewisePoly::Piece> segs;
    for (int i = 0; i < nseg; ++i) {
        const double c0 = allow_zero_density && unif(rng) < 0.25 ? 0.0 : 0.2 + unif(rng);
        Polynomial poly;
        if (unif(rng) < 0.5) {
            poly = Polynomial::constant(c0);
        } else {
            // nonnegative linear density c0 + c1 t on the segment
            const double c1 = 0.3 * unif(rng);
            poly = Polynomial{{c0, c1}};
        }
        segs.push_back({edges[i], edges[i + 1], poly});
    }

    std::uniform_int_distribution<int> natom_d(0, max_atoms);
    const int natoms = natom_d(rng);
    std::vector<double> times;
    for (int i = 0; i < natoms; ++i) times.push_back(horizon * (0.05 + 0.9 * unif(rng)));
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<Atom> atoms;
    for (double t : times) atoms.push_back({t, 0.1 + unif(rng)});
    return DriverMeasure(std::move(segs), std::move(atoms));
}

// Piecewise-constant function on [0, horizon] with a few random levels.
struct PiecewiseConst {
    std::vector<double> edges;  // ascending, first 0, last horizon
    std::vector<double> values;

    double operator()(double t) const {
        for (std::size_t i = 1; i < edges.size(); ++i)
            if (t < edges[i]) return values[i - 1];
        return values.back();
    }
};

inline PiecewiseConst random_piecewise_const(std::mt19937& rng, double horizon, double lo,
                                             double hi) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> npc(1, 3);
    const int n = npc(rng);
    PiecewiseConst f;
    f.edges.push_back(0.0);
    for (int i = 1; i < n; ++i) f.edges.push_back(horizon * i / n + 0.2 * unif(rng));
    std::sort(f.edges.begin(), f.edges.end());
    f.edges.push_back(horizon);
    for (int i = 0; i < n; ++i) f.values.push_back(lo + (hi - lo) * unif(rng));
    return f;
}

}  // namespace ajk::testing
