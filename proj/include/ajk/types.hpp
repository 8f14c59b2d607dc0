#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace ajk {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;
using rvec = std::vector<double>;

// Bilinear pairing <u,w> = sum u_i w_i, no conjugation.
inline cplx dot(const cvec& u, const cvec& w) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
    return s;
}

inline cplx dot(const rvec& u, const cvec& w) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
    return s;
}

inline double dot(const rvec& u, const rvec& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * w[i];
    return s;
}

inline double norm_inf(const cvec& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double norm2(const cvec& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

inline double norm2(const rvec& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Dense square matrix, row-major. Symmetric by convention where the context
// demands it (diffusion blocks); nothing here enforces symmetry.
struct rmat {
    std::size_t n = 0;
    std::vector<double> a;

    rmat() = default;
    explicit rmat(std::size_t dim, double fill = 0.0) : n(dim), a(dim * dim, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    bool is_zero(double tol = 0.0) const {
        for (double x : a)
            if (std::abs(x) > tol) return false;
        return true;
    }
};

inline rmat zeros(std::size_t n) { return rmat(n, 0.0); }

// <u, M u> with the unconjugated pairing.
inline cplx quad_form(const rmat& m, const cvec& u) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < m.n; ++i) {
        cplx row{0.0, 0.0};
        for (std::size_t j = 0; j < m.n; ++j) row += m(i, j) * u[j];
        s += u[i] * row;
    }
    return s;
}

inline double quad_form(const rmat& m, const rvec& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m.n; ++j) row += m(i, j) * u[j];
        s += u[i] * row;
    }
    return s;
}

inline double frobenius_norm(const rmat& m) {
    double s = 0.0;
    for (double x : m.a) s += x * x;
    return std::sqrt(s);
}

}  // namespace ajk
