#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ajk/errors.hpp"
#include "ajk/types.hpp"

namespace ajk::ode {

struct Options {
    double abs_tol = 1e-11;
    double rel_tol = 1e-9;
    // Step cap keeps the cubic Hermite dense output well inside the
    // acceptance tolerances; accuracy at the nodes is governed by the
    // embedded error control alone.
    double max_step = 0.04;
    long max_steps = 2000000;
};

// Result of one backward sweep over a smooth panel.
struct PanelNode {
    double t;
    cvec y;
    cvec f;  // dy/dt at (t, y)
};

// Dormand-Prince 5(4) with adaptive steps, integrating dy/dt = f(t, y)
// BACKWARD from t_hi to t_lo (t_hi > t_lo). Appends nodes in decreasing t,
// including both endpoints; the caller supplies the node list so panels can
// be chained. `post` runs after each accepted step (projection / blow-up
// checks) and may modify y in place. Returns the accumulated local error
// estimate along the panel.
template <typename RHS, typename Post>
double integrate_backward(const RHS& f, double t_hi, double t_lo, cvec y, const Options& opt,
                          std::vector<PanelNode>& nodes, const Post& post) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    if (!(t_hi > t_lo)) {
        if (t_hi == t_lo) {
            cvec f0 = f(t_hi, y);
            nodes.push_back({t_hi, y, f0});
            return 0.0;
        }
        throw Error("integrate_backward: t_hi < t_lo");
    }

    cvec k1 = f(t_hi, y);
    nodes.push_back({t_hi, y, k1});

    const double span = t_hi - t_lo;
    double h = -std::min({span, opt.max_step, std::max(1e-8, span / 16.0)});
    double t = t_hi;
    double err_accum = 0.0;
    long steps = 0;

    cvec k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);

    while (t > t_lo) {
        if (++steps > opt.max_steps) throw Error("integrate_backward: step limit exceeded");
        if (t + h < t_lo) h = t_lo - t;
        // Guard against stagnation from cancellation.
        if (t + h == t) throw Error("integrate_backward: step underflow at t=" + std::to_string(t));

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        k2 = f(t + c2 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = f(t + c3 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = f(t + c4 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = f(t + c5 * h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        k6 = f(t + h, ytmp);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = f(t + h, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                e7 * k7[i]);
            const double sc =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double r = std::abs(e) / sc;
            err += r * r;
        }
        err = std::sqrt(err / std::max<std::size_t>(n, 1));

        if (err <= 1.0) {
            t += h;
            y = ynew;
            post(t, y);
            k1 = f(t, y);  // recompute in case post projected y
            err_accum += err * opt.abs_tol;
            nodes.push_back({t, y, k1});
        }
        double fac = 0.9 * std::pow(err > 0 ? err : 1e-10, -0.2);
        fac = std::min(5.0, std::max(0.2, fac));
        h *= fac;
        if (-h > opt.max_step) h = -opt.max_step;
        const double hmin = 1e-14 * std::max(1.0, std::abs(t));
        if (-h < hmin) h = -hmin;
    }
    return err_accum;
}

inline double hermite_weight_h00(double s) { return (1 + 2 * s) * (1 - s) * (1 - s); }
inline double hermite_weight_h10(double s) { return s * (1 - s) * (1 - s); }
inline double hermite_weight_h01(double s) { return s * s * (3 - 2 * s); }
inline double hermite_weight_h11(double s) { return s * s * (s - 1); }

// Cubic Hermite interpolation on [t0, t1] from endpoint values/derivatives,
// written in difference form so constants reproduce exactly.
inline cvec hermite_eval(double t, double t0, const cvec& y0, const cvec& f0, double t1,
                         const cvec& y1, const cvec& f1) {
    const double w = t1 - t0;
    if (w <= 0.0) return y1;
    const double s = (t - t0) / w;
    const double h10 = hermite_weight_h10(s), h01 = hermite_weight_h01(s),
                 h11 = hermite_weight_h11(s);
    cvec out(y0.size());
    for (std::size_t i = 0; i < y0.size(); ++i)
        out[i] = y0[i] + h01 * (y1[i] - y0[i]) + w * (h10 * f0[i] + h11 * f1[i]);
    return out;
}

}  // namespace ajk::ode
