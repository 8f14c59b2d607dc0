#pragma once

#include <functional>
#include <vector>

#include "ajk/piecewise_poly.hpp"
#include "ajk/quadrature.hpp"
#include "ajk/types.hpp"

namespace ajk {

// Atom of the driver: mass dA > 0 placed at time t.
struct Atom {
    double t;
    double dA;
};

// The increasing cadlag driver A = A^c + sum of atoms. A^c is absolutely
// continuous with piecewise-polynomial density a(t) >= 0; segments tile
// [0, T_max]; atom times are strictly increasing and lie in (0, T_max].
class DriverMeasure {
public:
    DriverMeasure(std::vector<PiecewisePoly::Piece> segments, std::vector<Atom> atoms);

    static DriverMeasure lebesgue(double horizon);
    static DriverMeasure lebesgue_with_atoms(double horizon, std::vector<Atom> atoms);
    static DriverMeasure pure_atoms(double horizon, std::vector<Atom> atoms);

    double horizon() const { return horizon_; }
    const std::vector<PiecewisePoly::Piece>& segments() const { return density_.pieces; }
    const std::vector<Atom>& atoms() const { return atoms_; }

    // Density of A^c at t (dv-a.e. value).
    double density(double t) const { return density_(t); }

    // Density polynomial valid on the whole open interval (lo, hi); the
    // interval must not straddle a segment boundary.
    const Polynomial& density_on(double lo, double hi) const;

    // A(t) = A^c(t) + sum_{t_j <= t} dA_j, cadlag.
    double eval(double t) const;

    // A^c mass of (s, t], exact polynomial integration.
    double continuous_mass(double s, double t) const;

    // Atoms with time in (s, t].
    std::vector<Atom> atoms_in(double s, double t) const;

    // Atom exactly at t, if any (times compared exactly, no tolerance window).
    const Atom* atom_at(double t) const;

    // Total mass of (s, t].
    double mass(double s, double t) const { return continuous_mass(s, t) + atom_mass(s, t); }

    double atom_mass(double s, double t) const;

    // Ordered breakpoints of (s, t) where the density polynomial changes.
    std::vector<double> density_breaks(double s, double t) const;

    void require_range(double t) const;

private:
    PiecewisePoly density_;
    std::vector<Atom> atoms_;
    double horizon_ = 0.0;
};

// Stieltjes integral of g over (s, t]: quadrature against the density plus
// g(t_j) dA_j for atoms in (s, t]. The half-open convention is global.
cvec integrate(const DriverMeasure& A, const std::function<cvec(double)>& g, double s, double t,
               const QuadratureOptions& opt = {});

cplx integrate_scalar(const DriverMeasure& A, const std::function<cplx(double)>& g, double s,
                      double t, const QuadratureOptions& opt = {});

double integrate_real(const DriverMeasure& A, const std::function<double(double)>& g, double s,
                      double t, const QuadratureOptions& opt = {});

// Same integrals against A^c alone (atoms skipped).
double integrate_real_continuous(const DriverMeasure& A, const std::function<double(double)>& g,
                                 double s, double t, const QuadratureOptions& opt = {});

cplx integrate_scalar_continuous(const DriverMeasure& A, const std::function<cplx(double)>& g,
                                 double s, double t, const QuadratureOptions& opt = {});

}  // namespace ajk
