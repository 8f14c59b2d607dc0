#include "ajk/stieltjes.hpp"

#include <algorithm>
#include <cmath>

#include "ajk/errors.hpp"
#include "ajk/ode_rk45.hpp"

namespace ajk {

StieltjesTrajectory::StieltjesTrajectory(std::vector<TrajectoryNode> nodes)
    : nodes_(std::move(nodes)) {
    if (nodes_.empty()) throw Error("StieltjesTrajectory: no nodes");
}

std::vector<double> StieltjesTrajectory::breakpoints() const {
    std::vector<double> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) out.push_back(n.t);
    return out;
}

std::size_t StieltjesTrajectory::locate(double t) const {
    if (t < nodes_.front().t - 1e-12 || t > nodes_.back().t + 1e-12)
        throw OutOfDomain("StieltjesTrajectory: t outside stored range");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                               [](double x, const TrajectoryNode& n) { return x < n.t; });
    if (it == nodes_.begin()) return 0;
    return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

cvec StieltjesTrajectory::value(double t) const {
    const std::size_t i = locate(t);
    const auto& lo = nodes_[i];
    if (t <= lo.t) return lo.value;
    if (i + 1 >= nodes_.size()) return nodes_.back().value;
    const auto& hi = nodes_[i + 1];
    if (t >= hi.t) return hi.value;
    const cvec& y1 = hi.has_left ? hi.left_value : hi.value;
    const cvec& f1 = hi.has_left ? hi.left_derivative : hi.derivative;
    return ode::hermite_eval(t, lo.t, lo.value, lo.derivative, hi.t, y1, f1);
}

cvec StieltjesTrajectory::left_value(double t) const {
    const std::size_t i = locate(t);
    const auto& lo = nodes_[i];
    if (t == lo.t) return lo.has_left ? lo.left_value : lo.value;
    return value(t);
}

StieltjesTrajectory make_trajectory_from_backward(std::vector<ode::PanelNode> desc) {
    // desc holds nodes in decreasing t; consecutive nodes at the same time
    // are (right data, left data) pairs produced by panel boundaries or atoms.
    std::vector<TrajectoryNode> nodes;
    nodes.reserve(desc.size());
    for (auto it = desc.rbegin(); it != desc.rend(); ++it) {
        // After reversal the LEFT data comes first at a duplicated time.
        if (!nodes.empty() && nodes.back().t == it->t) {
            TrajectoryNode& n = nodes.back();
            n.has_left = true;
            n.left_value = n.value;
            n.left_derivative = n.derivative;
            n.value = it->y;
            n.derivative = it->f;
        } else {
            nodes.push_back({it->t, it->y, it->f, false, {}, {}});
        }
    }
    return StieltjesTrajectory(std::move(nodes));
}

double pseudo_exponential(const DriverMeasure& A, const std::function<double(double)>& L, double t,
                          double T) {
    if (t > T) throw OutOfDomain("pseudo_exponential: requires t <= T");
    A.require_range(t);
    A.require_range(T);
    const double expo = integrate_real_continuous(A, L, t, T);
    double prod = 1.0;
    for (const auto& atom : A.atoms_in(t, T)) {
        const double factor = 1.0 + L(atom.t) * atom.dA;
        if (factor < 0.0)
            throw PreconditionViolated("pseudo_exponential: 1 + L dA < 0 at t=" +
                                       std::to_string(atom.t));
        prod *= factor;
    }
    return std::exp(expo) * prod;
}

double gronwall_bound(const DriverMeasure& A, double delta, const std::function<double(double)>& L,
                      double t, double T) {
    if (delta < 0.0) throw PreconditionViolated("gronwall_bound: delta must be >= 0");
    if (delta == 0.0) return 0.0;
    return delta * std::exp(integrate_real(A, L, t, T));
}

namespace {

rmat matmul(const rmat& a, const rmat& b) {
    rmat c(a.n);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t k = 0; k < a.n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < a.n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

rvec matvec(const rmat& a, const rvec& x) {
    rvec y(a.n, 0.0);
    for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) y[i] += a(i, j) * x[j];
    return y;
}

// exp(X) x by scaling-squaring with a Taylor series on the scaled matrix.
rvec expm_apply(rmat X, rvec x) {
    const double nrm = frobenius_norm(X);
    int squarings = 0;
    while (nrm / std::pow(2.0, squarings) > 0.25) ++squarings;
    const double scale = std::pow(2.0, -squarings);
    for (auto& v : X.a) v *= scale;

    rmat E(X.n);
    for (std::size_t i = 0; i < X.n; ++i) E(i, i) = 1.0;
    rmat term = E;
    for (int k = 1; k <= 24; ++k) {
        term = matmul(term, X);
        double mx = 0.0;
        for (std::size_t i = 0; i < term.a.size(); ++i) {
            term.a[i] /= k;
            E.a[i] += term.a[i];
            mx = std::max(mx, std::abs(term.a[i]));
        }
        if (mx < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) E = matmul(E, E);
    return matvec(E, x);
}

rmat integrate_weighted_matrix(const Polynomial& density, const std::function<rmat(double)>& L,
                               double lo, double hi, std::size_t d) {
    // Flatten to a cvec so the adaptive quadrature machinery applies.
    auto f = [&](double s) {
        const rmat m = L(s);
        const double w = density(s);
        cvec v(d * d);
        for (std::size_t i = 0; i < d * d; ++i) v[i] = w * m.a[i];
        return v;
    };
    QuadratureOptions q;
    q.abs_tol = 1e-15;
    q.rel_tol = 1e-14;
    const cvec v = gauss_kronrod<cvec>(f, lo, hi, q);
    rmat out(d);
    for (std::size_t i = 0; i < d * d; ++i) out.a[i] = v[i].real();
    return out;
}

rmat commutator(const rmat& a, const rmat& b) {
    rmat ab = matmul(a, b), ba = matmul(b, a);
    rmat c(a.n);
    for (std::size_t i = 0; i < c.a.size(); ++i) c.a[i] = ab.a[i] - ba.a[i];
    return c;
}

cvec to_cvec(const rvec& x) {
    cvec v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = cplx{x[i], 0.0};
    return v;
}

}  // namespace

StieltjesTrajectory solve_linear(const DriverMeasure& A, const std::function<rmat(double)>& L,
                                 const rvec& terminal, double T) {
    A.require_range(T);
    const std::size_t d = terminal.size();
    std::vector<ode::PanelNode> desc;

    auto record = [&](double t, const rvec& g, double density) {
        rvec der = matvec(L(t), g);
        for (auto& v : der) v *= -density;
        desc.push_back({t, to_cvec(g), to_cvec(der)});
    };

    // Atoms processed in decreasing time; an atom at T is processed first.
    std::vector<Atom> atoms = A.atoms_in(-1.0, T);
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t > b.t; });

    rvec g = terminal;
    double t_hi = T;
    record(T, g, A.density(T));

    auto integrate_stretch = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        std::vector<double> pts = A.density_breaks(lo, hi);
        pts.insert(pts.begin(), lo);
        pts.push_back(hi);
        for (std::size_t i = pts.size(); i-- > 1;) {
            const double phi = pts[i], plo = pts[i - 1];
            const Polynomial& dens = A.density_on(plo, phi);
            record(phi, g, dens(phi));  // left-side data at the panel top
            const std::size_t nsub =
                std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((phi - plo) * 16.0)));
            for (std::size_t k = nsub; k-- > 0;) {
                const double a = plo + (phi - plo) * k / nsub;
                const double b = plo + (phi - plo) * (k + 1) / nsub;
                const double mid = 0.5 * (a + b);
                const rmat P1 = integrate_weighted_matrix(dens, L, a, mid, d);
                const rmat P2 = integrate_weighted_matrix(dens, L, mid, b, d);
                // g(a) = exp(P1 + P2 - [P2, P1]/2) g(b); exact when L(s) commute.
                rmat X = commutator(P2, P1);
                for (std::size_t j = 0; j < X.a.size(); ++j)
                    X.a[j] = P1.a[j] + P2.a[j] - 0.5 * X.a[j];
                g = expm_apply(X, g);
                record(a, g, dens(a));
            }
        }
    };

    for (const auto& atom : atoms) {
        integrate_stretch(atom.t, t_hi);
        // g(t-) = (I + dA L(t)) g(t)
        rvec bump = matvec(L(atom.t), g);
        for (std::size_t i = 0; i < d; ++i) g[i] += atom.dA * bump[i];
        record(atom.t, g, A.density(atom.t));
        t_hi = atom.t;
    }
    integrate_stretch(0.0, t_hi);
    return make_trajectory_from_backward(std::move(desc));
}

StieltjesTrajectory solve_scalar_measure_ode(const DriverMeasure& A,
                                             const std::function<double(double, double)>& F,
                                             double terminal, double T) {
    A.require_range(T);
    std::vector<ode::PanelNode> desc;
    ode::Options opt;
    auto no_post = [](double, cvec&) {};

    std::vector<Atom> atoms = A.atoms_in(-1.0, T);
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.t > b.t; });

    cvec y{cplx{terminal, 0.0}};

    auto rhs_at = [&](double t, const cvec& v) {
        cvec out(1);
        out[0] = cplx{-A.density(t) * F(t, v[0].real()), 0.0};
        return out;
    };

    auto run_panels = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        std::vector<double> pts = A.density_breaks(lo, hi);
        pts.insert(pts.begin(), lo);
        pts.push_back(hi);
        for (std::size_t i = pts.size(); i-- > 1;) {
            const Polynomial& dens = A.density_on(pts[i - 1], pts[i]);
            auto rhs = [&](double t, const cvec& v) {
                cvec out(1);
                out[0] = cplx{-dens(t) * F(t, v[0].real()), 0.0};
                return out;
            };
            ode::integrate_backward(rhs, pts[i], pts[i - 1], y, opt, desc, no_post);
            y = desc.back().y;
        }
    };

    double t_hi = T;
    bool recorded_terminal = false;
    for (const auto& atom : atoms) {
        if (t_hi > atom.t) {
            run_panels(atom.t, t_hi);
            recorded_terminal = true;
        } else if (!recorded_terminal) {
            desc.push_back({t_hi, y, rhs_at(t_hi, y)});
            recorded_terminal = true;
        }
        const double g = y[0].real();
        y[0] = cplx{g + F(atom.t, g) * atom.dA, 0.0};
        desc.push_back({atom.t, y, rhs_at(atom.t, y)});
        t_hi = atom.t;
    }
    if (t_hi > 0.0) {
        run_panels(0.0, t_hi);
    } else if (!recorded_terminal) {
        desc.push_back({t_hi, y, rhs_at(t_hi, y)});
    }
    return make_trajectory_from_backward(std::move(desc));
}

}  // namespace ajk
