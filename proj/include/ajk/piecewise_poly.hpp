#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ajk/errors.hpp"

namespace ajk {

// Polynomial in absolute time, coeffs[k] * t^k.
struct Polynomial {
    std::vector<double> coeffs;

    Polynomial() = default;
    Polynomial(std::initializer_list<double> c) : coeffs(c) {}
    explicit Polynomial(std::vector<double> c) : coeffs(std::move(c)) {}

    static Polynomial constant(double c) { return Polynomial{{c}}; }

    double operator()(double t) const {
        double v = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) v = v * t + coeffs[k];
        return v;
    }

    // Exact integral over [a, b].
    double integral(double a, double b) const {
        double va = 0.0, vb = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) {
            const double c = coeffs[k] / static_cast<double>(k + 1);
            va = va * a + c;
            vb = vb * b + c;
        }
        return vb * b - va * a;
    }

    bool is_zero() const {
        for (double c : coeffs)
            if (c != 0.0) return false;
        return true;
    }
};

// Piecewise polynomial on consecutive intervals [t0, t1). Evaluation at the
// right end of the last piece is allowed (closed on the far right).
struct PiecewisePoly {
    struct Piece {
        double t0;
        double t1;
        Polynomial poly;
    };
    std::vector<Piece> pieces;

    PiecewisePoly() = default;

    static PiecewisePoly constant(double c, double t0, double t1) {
        PiecewisePoly p;
        p.pieces.push_back({t0, t1, Polynomial::constant(c)});
        return p;
    }

    bool empty() const { return pieces.empty(); }
    double t_begin() const { return pieces.front().t0; }
    double t_end() const { return pieces.back().t1; }

    const Piece& piece_at(double t) const {
        if (pieces.empty() || t < pieces.front().t0 || t > pieces.back().t1)
            throw OutOfDomain("PiecewisePoly: time outside supported range");
        auto it = std::upper_bound(pieces.begin(), pieces.end(), t,
                                   [](double x, const Piece& p) { return x < p.t1; });
        if (it == pieces.end()) --it;
        return *it;
    }

    double operator()(double t) const { return piece_at(t).poly(t); }

    double integral(double a, double b) const {
        if (a > b) return -integral(b, a);
        double s = 0.0;
        for (const auto& p : pieces) {
            const double lo = std::max(a, p.t0);
            const double hi = std::min(b, p.t1);
            if (hi > lo) s += p.poly.integral(lo, hi);
        }
        return s;
    }
};

}  // namespace ajk
