#pragma once

#include <cmath>
#include <functional>

#include "ajk/errors.hpp"
#include "ajk/types.hpp"

namespace ajk {

struct QuadratureOptions {
    double abs_tol = 5e-14;
    double rel_tol = 1e-13;
    int max_intervals = 4096;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
inline constexpr double gk_nodes[8] = {
    0.000000000000000000000000000000000, 0.207784955007898467600689403773245,
    0.405845151377397166906606412076961, 0.586087235467691130294144838258730,
    0.741531185599394439863864773280788, 0.864864423359769072789712788640926,
    0.949107912342758524526189684047851, 0.991455371120812639206854697526329};
inline constexpr double gk_wk[8] = {
    0.209482141084727828012999174891714, 0.204432940075298892414161999234649,
    0.190350578064785409913256402421014, 0.169004726639267902826583426598550,
    0.140653259715525918745189590510238, 0.104790010322250183839876322541518,
    0.063092092629978553290700663189204, 0.022935322010529224963732008058970};
inline constexpr double gk_wg[4] = {
    0.417959183673469387755102040816327, 0.381830050505118944950369775488975,
    0.279705391489276667901467771423780, 0.129484966168869693270611432679082};

template <typename V>
struct ValueOps;

template <>
struct ValueOps<double> {
    static double zero(const double&) { return 0.0; }
    static void axpy(double& y, double a, const double& x) { y += a * x; }
    static void scale(double& y, double a) { y *= a; }
    static double err(const double& a, const double& b) { return std::abs(a - b); }
    static double mag(const double& a) { return std::abs(a); }
};

template <>
struct ValueOps<cplx> {
    static cplx zero(const cplx&) { return {0.0, 0.0}; }
    static void axpy(cplx& y, double a, const cplx& x) { y += a * x; }
    static void scale(cplx& y, double a) { y *= a; }
    static double err(const cplx& a, const cplx& b) { return std::abs(a - b); }
    static double mag(const cplx& a) { return std::abs(a); }
};

template <>
struct ValueOps<cvec> {
    static cvec zero(const cvec& proto) { return cvec(proto.size(), cplx{0.0, 0.0}); }
    static void axpy(cvec& y, double a, const cvec& x) {
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
    }
    static void scale(cvec& y, double a) {
        for (auto& v : y) v *= a;
    }
    static double err(const cvec& a, const cvec& b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    }
    static double mag(const cvec& a) { return norm_inf(a); }
};

template <typename V, typename F>
void gk15(const F& f, double a, double b, V& kronrod, V& gauss) {
    using Ops = ValueOps<V>;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    V f0 = f(c);
    kronrod = Ops::zero(f0);
    gauss = Ops::zero(f0);
    Ops::axpy(kronrod, gk_wk[0] * h, f0);
    Ops::axpy(gauss, gk_wg[0] * h, f0);
    for (int j = 1; j < 8; ++j) {
        const double x = gk_nodes[j] * h;
        V lo = f(c - x);
        V hi = f(c + x);
        Ops::axpy(kronrod, gk_wk[j] * h, lo);
        Ops::axpy(kronrod, gk_wk[j] * h, hi);
        if (j % 2 == 0) {
            Ops::axpy(gauss, gk_wg[j / 2] * h, lo);
            Ops::axpy(gauss, gk_wg[j / 2] * h, hi);
        }
    }
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod 7-15 on [a, b]: the interval with the
// largest error estimate is bisected until the summed estimate meets the
// tolerance. Robust for integrands with interior kinks or steps, which
// width-proportional local budgets stall on. V is double, cplx or cvec.
template <typename V, typename F>
V gauss_kronrod(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
    using Ops = detail::ValueOps<V>;
    if (a == b) {
        V probe = f(a);
        return Ops::zero(probe);
    }

    struct Panel {
        double a, b, err;
        V k;
    };
    std::vector<Panel> panels;
    // Two-scale estimate: a whole-panel rule can coincidentally agree with
    // its embedded lower-order rule across a step; checking against the
    // bisected sum catches that. Edge sentinels guard the slivers between a
    // panel boundary and the outermost node, which no rule samples.
    auto edge_sentinel = [&](double at, double inner1, double inner2, double width) {
        const double d_edge = Ops::err(f(at), f(inner1));
        const double d_inner = Ops::err(f(inner1), f(inner2));
        return width * std::max(0.0, d_edge - 3.0 * d_inner);
    };
    auto push = [&](double lo, double hi) {
        V k, g, kl, gl, kr, gr;
        detail::gk15(f, lo, hi, k, g);
        const double mid = 0.5 * (lo + hi);
        detail::gk15(f, lo, mid, kl, gl);
        detail::gk15(f, mid, hi, kr, gr);
        V halves = kl;
        Ops::axpy(halves, 1.0, kr);
        double err = std::max(Ops::err(halves, k), Ops::err(kl, gl) + Ops::err(kr, gr));
        // Sliver width between the boundary and the first Kronrod node.
        const double h_e = 0.5 * (hi - lo) * (1.0 - detail::gk_nodes[7]);
        err += edge_sentinel(lo, lo + h_e, lo + 2.0 * h_e, h_e);
        err += edge_sentinel(hi, hi - h_e, hi - 2.0 * h_e, h_e);
        panels.push_back({lo, hi, err, halves});
    };
    const int init = 4;
    for (int i = 0; i < init; ++i) push(a + (b - a) * i / init, a + (b - a) * (i + 1) / init);

    while (true) {
        double total_err = 0.0;
        V sum = Ops::zero(panels.front().k);
        for (const auto& p : panels) {
            total_err += p.err;
            Ops::axpy(sum, 1.0, p.k);
        }
        const double tol = std::max(opt.abs_tol, opt.rel_tol * Ops::mag(sum));
        if (total_err <= tol) return sum;
        if (static_cast<int>(panels.size()) >= opt.max_intervals)
            throw QuadratureFailure("adaptive Gauss-Kronrod did not converge on [" +
                                    std::to_string(a) + ", " + std::to_string(b) + "]");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < panels.size(); ++i)
            if (panels[i].err > panels[worst].err) worst = i;
        const Panel w = panels[worst];
        if (w.b - w.a < 5e-16 * std::max(1.0, std::max(std::abs(w.a), std::abs(w.b)))) {
            // Interval is at floating-point resolution; accept what we have.
            panels[worst].err = 0.0;
            continue;
        }
        panels.erase(panels.begin() + static_cast<std::ptrdiff_t>(worst));
        const double mid = 0.5 * (w.a + w.b);
        push(w.a, mid);
        push(mid, w.b);
    }
}

}  // namespace ajk
