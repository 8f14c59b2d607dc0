#include "ajk/driver_measure.hpp"

#include <algorithm>
#include <cmath>

#include "ajk/errors.hpp"

namespace ajk {

namespace {

bool density_nonnegative(const PiecewisePoly::Piece& p) {
    // Sample check; densities in this artifact are low-degree polynomials.
    const int n = 33;
    for (int i = 0; i <= n; ++i) {
        const double t = p.t0 + (p.t1 - p.t0) * i / n;
        if (p.poly(t) < -1e-14) return false;
    }
    return true;
}

}  // namespace

DriverMeasure::DriverMeasure(std::vector<PiecewisePoly::Piece> segments, std::vector<Atom> atoms)
    : atoms_(std::move(atoms)) {
    if (segments.empty()) throw InvalidParameter("DriverMeasure: needs at least one segment");
    std::sort(segments.begin(), segments.end(),
              [](const auto& a, const auto& b) { return a.t0 < b.t0; });
    if (segments.front().t0 != 0.0)
        throw InvalidParameter("DriverMeasure: segments must start at 0");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!(segments[i].t1 > segments[i].t0))
            throw InvalidParameter("DriverMeasure: empty segment");
        if (i + 1 < segments.size() && segments[i].t1 != segments[i + 1].t0)
            throw InvalidParameter("DriverMeasure: segments must tile [0, T_max] with no gaps");
        if (!density_nonnegative(segments[i]))
            throw InvalidParameter("DriverMeasure: density must be nonnegative");
    }
    horizon_ = segments.back().t1;
    density_.pieces = std::move(segments);

    double prev = 0.0;
    for (const auto& a : atoms_) {
        if (!(a.t > prev)) throw InvalidParameter("DriverMeasure: atom times must be strictly increasing and > 0");
        if (a.t > horizon_) throw InvalidParameter("DriverMeasure: atom beyond horizon");
        if (!(a.dA > 0.0)) throw InvalidParameter("DriverMeasure: atom mass must be > 0");
        prev = a.t;
    }
}

DriverMeasure DriverMeasure::lebesgue(double horizon) {
    return lebesgue_with_atoms(horizon, {});
}

DriverMeasure DriverMeasure::lebesgue_with_atoms(double horizon, std::vector<Atom> atoms) {
    std::vector<PiecewisePoly::Piece> segs{{0.0, horizon, Polynomial::constant(1.0)}};
    return DriverMeasure(std::move(segs), std::move(atoms));
}

DriverMeasure DriverMeasure::pure_atoms(double horizon, std::vector<Atom> atoms) {
    std::vector<PiecewisePoly::Piece> segs{{0.0, horizon, Polynomial::constant(0.0)}};
    return DriverMeasure(std::move(segs), std::move(atoms));
}

const Polynomial& DriverMeasure::density_on(double lo, double hi) const {
    for (const auto& p : density_.pieces)
        if (p.t0 <= lo && hi <= p.t1) return p.poly;
    throw Error("DriverMeasure: interval straddles a segment boundary");
}

void DriverMeasure::require_range(double t) const {
    if (t < 0.0 || t > horizon_)
        throw OutOfDomain("DriverMeasure: t=" + std::to_string(t) + " outside [0, " +
                          std::to_string(horizon_) + "]");
}

double DriverMeasure::eval(double t) const {
    require_range(t);
    double v = continuous_mass(0.0, t);
    for (const auto& a : atoms_) {
        if (a.t <= t) v += a.dA;
        else break;
    }
    return v;
}

double DriverMeasure::continuous_mass(double s, double t) const {
    return density_.integral(s, t);
}

std::vector<Atom> DriverMeasure::atoms_in(double s, double t) const {
    std::vector<Atom> out;
    for (const auto& a : atoms_)
        if (a.t > s && a.t <= t) out.push_back(a);
    return out;
}

const Atom* DriverMeasure::atom_at(double t) const {
    for (const auto& a : atoms_)
        if (a.t == t) return &a;
    return nullptr;
}

double DriverMeasure::atom_mass(double s, double t) const {
    double m = 0.0;
    for (const auto& a : atoms_)
        if (a.t > s && a.t <= t) m += a.dA;
    return m;
}

std::vector<double> DriverMeasure::density_breaks(double s, double t) const {
    std::vector<double> out;
    for (const auto& p : density_.pieces) {
        if (p.t0 > s && p.t0 < t) out.push_back(p.t0);
        if (p.t1 > s && p.t1 < t) out.push_back(p.t1);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

template <typename V, typename F>
V integrate_impl(const DriverMeasure& A, const F& g, double s, double t,
                 const QuadratureOptions& opt, bool with_atoms = true) {
    if (s > t) throw OutOfDomain("integrate: requires s <= t");
    A.require_range(s);
    A.require_range(t);

    // Split at density breakpoints so each quadrature panel is smooth.
    std::vector<double> pts = A.density_breaks(s, t);
    pts.insert(pts.begin(), s);
    pts.push_back(t);

    V acc = detail::ValueOps<V>::zero(g(t));
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double lo = pts[i], hi = pts[i + 1];
        if (!(hi > lo)) continue;
        const auto& piece = *std::find_if(
            A.segments().begin(), A.segments().end(),
            [&](const auto& p) { return p.t0 <= lo && hi <= p.t1; });
        if (piece.poly.is_zero()) continue;
        auto weighted = [&](double r) {
            V v = g(r);
            detail::ValueOps<V>::scale(v, piece.poly(r));
            return v;
        };
        V part = gauss_kronrod<V>(weighted, lo, hi, opt);
        detail::ValueOps<V>::axpy(acc, 1.0, part);
    }
    if (with_atoms) {
        for (const auto& atom : A.atoms_in(s, t)) {
            detail::ValueOps<V>::axpy(acc, atom.dA, g(atom.t));
        }
    }
    return acc;
}

}  // namespace

cvec integrate(const DriverMeasure& A, const std::function<cvec(double)>& g, double s, double t,
               const QuadratureOptions& opt) {
    return integrate_impl<cvec>(A, g, s, t, opt);
}

cplx integrate_scalar(const DriverMeasure& A, const std::function<cplx(double)>& g, double s,
                      double t, const QuadratureOptions& opt) {
    return integrate_impl<cplx>(A, g, s, t, opt);
}

double integrate_real(const DriverMeasure& A, const std::function<double(double)>& g, double s,
                      double t, const QuadratureOptions& opt) {
    return integrate_impl<double>(A, g, s, t, opt);
}

double integrate_real_continuous(const DriverMeasure& A, const std::function<double(double)>& g,
                                 double s, double t, const QuadratureOptions& opt) {
    return integrate_impl<double>(A, g, s, t, opt, false);
}

cplx integrate_scalar_continuous(const DriverMeasure& A, const std::function<cplx(double)>& g,
                                 double s, double t, const QuadratureOptions& opt) {
    return integrate_impl<cplx>(A, g, s, t, opt, false);
}

}  // namespace ajk
