#include "ajk/jump_measure.hpp"

#include <cmath>

#include "ajk/quadrature.hpp"

namespace ajk {

void StateSpaceShape::require_in_U(const cvec& u, double tol) const {
    if (u.size() != d()) throw DomainViolation("u has wrong dimension");
    for (std::size_t k = 0; k < m; ++k)
        if (u[k].real() > tol)
            throw DomainViolation("Re u_" + std::to_string(k + 1) +
                                  " > 0 on a nonnegative coordinate");
}

rvec truncation_h(const rvec& x) {
    if (norm2(x) <= 1.0) return x;
    return rvec(x.size(), 0.0);
}

namespace {

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(a <= xi <= b) and E[xi 1{a <= xi <= b}] for xi ~ N(m, s^2).
void gaussian_window(double m, double s, double a, double b, double& prob, double& mean_part) {
    const double alpha = (a - m) / s, beta = (b - m) / s;
    prob = std_normal_cdf(beta) - std_normal_cdf(alpha);
    mean_part = m * prob + s * (std_normal_pdf(alpha) - std_normal_pdf(beta));
}

struct ExpIntegrand {
    // value of e^{<x,u>} - 1 - <h(x),u> (or the untruncated variant)
    const cvec& u;
    bool truncated;
    cplx operator()(const rvec& x) const {
        cplx hx{0.0, 0.0};
        if (truncated) {
            hx = dot(truncation_h(x), u);
        } else {
            hx = dot(x, u);
        }
        return std::exp(dot(x, u)) - 1.0 - hx;
    }
};

// Recursive tensor quadrature over a box; inner dimensions re-integrate.
cplx box_quadrature(const std::function<cplx(const rvec&)>& f, const rvec& lo, const rvec& hi,
                    rvec& x, std::size_t k, const QuadratureOptions& opt) {
    if (k == lo.size()) return f(x);
    auto g = [&](double xi) {
        x[k] = xi;
        return box_quadrature(f, lo, hi, x, k + 1, opt);
    };
    return gauss_kronrod<cplx>(g, lo[k], hi[k], opt);
}

cplx box_quadrature(const std::function<cplx(const rvec&)>& f, const rvec& lo, const rvec& hi) {
    QuadratureOptions opt;
    rvec x(lo.size(), 0.0);
    return box_quadrature(f, lo, hi, x, 0, opt);
}

rvec axis_point(std::size_t dim, std::size_t axis, const rvec& offset, double xi) {
    rvec x = offset.empty() ? rvec(dim, 0.0) : offset;
    x.resize(dim, 0.0);
    x[axis] = xi;
    return x;
}

// Integration window covering essentially all Gaussian mass.
void gaussian_box(const GaussianAxis& g, double& lo, double& hi) {
    lo = g.mean - 12.0 * g.stddev;
    hi = g.mean + 12.0 * g.stddev;
    if (g.restrict_to_D) lo = std::max(lo, 0.0);
}

}  // namespace

double JumpMeasureSpec::total_mass() const {
    double m = 0.0;
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) {
            m += p->weight;
        } else if (const auto* p = std::get_if<GaussianAxis>(&c)) {
            m += p->weight;
        } else if (const auto* p = std::get_if<ExponentialAxis>(&c)) {
            m += p->weight;
        } else if (const auto* p = std::get_if<NumericDensity>(&c)) {
            auto f = [&](const rvec& x) { return cplx{p->density(x), 0.0}; };
            m += p->weight * box_quadrature(f, p->lo, p->hi).real();
        }
    }
    return m;
}

cplx JumpMeasureSpec::exp_integral(const cvec& u) const {
    cplx acc{0.0, 0.0};
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) {
            acc += p->weight * (std::exp(dot(p->x, u)) - 1.0 - dot(truncation_h(p->x), u));
        } else if (const auto* p = std::get_if<GaussianAxis>(&c)) {
            if (p->restrict_to_D) {
                double lo, hi;
                gaussian_box(*p, lo, hi);
                double norm, unused;
                gaussian_window(p->mean, p->stddev, 0.0, hi, norm, unused);
                auto f = [&](double xi) {
                    const rvec x = axis_point(dim_, p->axis, p->offset, xi);
                    const double dens = std_normal_pdf((xi - p->mean) / p->stddev) /
                                        (p->stddev * norm);
                    return dens * ExpIntegrand{u, true}(x);
                };
                acc += p->weight * gauss_kronrod<cplx>(f, lo, hi);
            } else {
                // e^{<off,u>} E[e^{u_a xi}] - 1 - <h-part, u> with the
                // truncated first moment in closed form.
                const cplx ua = u[p->axis];
                cplx off_dot{0.0, 0.0};
                double off_norm2 = 0.0;
                if (!p->offset.empty()) {
                    off_dot = dot(p->offset, u);
                    for (double v : p->offset) off_norm2 += v * v;
                }
                const cplx mgf =
                    std::exp(off_dot + ua * p->mean + 0.5 * ua * ua * p->stddev * p->stddev);
                cplx h_term{0.0, 0.0};
                if (off_norm2 <= 1.0) {
                    const double rho = std::sqrt(1.0 - off_norm2);
                    double prob, mean_part;
                    gaussian_window(p->mean, p->stddev, -rho, rho, prob, mean_part);
                    h_term = off_dot * prob + ua * mean_part;
                }
                acc += p->weight * (mgf - 1.0 - h_term);
            }
        } else if (const auto* p = std::get_if<ExponentialAxis>(&c)) {
            const cplx ua = u[p->axis];
            if (ua.real() >= p->rate)
                throw DivergentIntegral("exponential jump component: Re u >= rate");
            const cplx mgf = p->rate / (p->rate - ua);
            // int_0^1 xi rate e^{-rate xi} dxi
            const double r = p->rate;
            const double h1 = (1.0 - std::exp(-r) * (1.0 + r)) / r;
            acc += p->weight * (mgf - 1.0 - ua * h1);
        } else if (const auto* p = std::get_if<NumericDensity>(&c)) {
            auto f = [&](const rvec& x) { return p->density(x) * ExpIntegrand{u, true}(x); };
            acc += p->weight * box_quadrature(f, p->lo, p->hi);
        }
    }
    return acc;
}

cplx JumpMeasureSpec::exp_integral_untruncated(const cvec& u) const {
    cplx acc{0.0, 0.0};
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) {
            acc += p->weight * (std::exp(dot(p->x, u)) - 1.0 - dot(p->x, u));
        } else if (const auto* p = std::get_if<GaussianAxis>(&c)) {
            if (p->restrict_to_D) {
                double lo, hi;
                gaussian_box(*p, lo, hi);
                double norm, unused;
                gaussian_window(p->mean, p->stddev, 0.0, hi, norm, unused);
                auto f = [&](double xi) {
                    const rvec x = axis_point(dim_, p->axis, p->offset, xi);
                    const double dens = std_normal_pdf((xi - p->mean) / p->stddev) /
                                        (p->stddev * norm);
                    return dens * ExpIntegrand{u, false}(x);
                };
                acc += p->weight * gauss_kronrod<cplx>(f, lo, hi);
            } else {
                const cplx ua = u[p->axis];
                cplx off_dot{0.0, 0.0};
                if (!p->offset.empty()) off_dot = dot(p->offset, u);
                const cplx mgf =
                    std::exp(off_dot + ua * p->mean + 0.5 * ua * ua * p->stddev * p->stddev);
                acc += p->weight * (mgf - 1.0 - (off_dot + ua * p->mean));
            }
        } else if (const auto* p = std::get_if<ExponentialAxis>(&c)) {
            const cplx ua = u[p->axis];
            if (ua.real() >= p->rate)
                throw DivergentIntegral("exponential jump component: Re u >= rate");
            acc += p->weight * (p->rate / (p->rate - ua) - 1.0 - ua / p->rate);
        } else if (const auto* p = std::get_if<NumericDensity>(&c)) {
            auto f = [&](const rvec& x) { return p->density(x) * ExpIntegrand{u, false}(x); };
            acc += p->weight * box_quadrature(f, p->lo, p->hi);
        }
    }
    return acc;
}

double JumpMeasureSpec::integrate(const std::function<double(const rvec&)>& f) const {
    double acc = 0.0;
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) {
            acc += p->weight * f(p->x);
        } else if (const auto* p = std::get_if<GaussianAxis>(&c)) {
            double lo, hi;
            gaussian_box(*p, lo, hi);
            double norm = 1.0;
            if (p->restrict_to_D) {
                double unused;
                gaussian_window(p->mean, p->stddev, 0.0, hi, norm, unused);
            }
            auto g = [&](double xi) {
                const rvec x = axis_point(dim_, p->axis, p->offset, xi);
                const double dens =
                    std_normal_pdf((xi - p->mean) / p->stddev) / (p->stddev * norm);
                return cplx{dens * f(x), 0.0};
            };
            acc += p->weight * gauss_kronrod<cplx>(g, lo, hi).real();
        } else if (const auto* p = std::get_if<ExponentialAxis>(&c)) {
            const double cap = 50.0 / p->rate;
            auto g = [&](double xi) {
                const rvec x = axis_point(dim_, p->axis, {}, xi);
                return cplx{p->rate * std::exp(-p->rate * xi) * f(x), 0.0};
            };
            acc += p->weight * gauss_kronrod<cplx>(g, 0.0, cap).real();
        } else if (const auto* p = std::get_if<NumericDensity>(&c)) {
            auto g = [&](const rvec& x) { return cplx{p->density(x) * f(x), 0.0}; };
            acc += p->weight * box_quadrature(g, p->lo, p->hi).real();
        }
    }
    return acc;
}

rvec JumpMeasureSpec::h_moment() const {
    rvec out(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t idx = i;
        out[i] = integrate([idx](const rvec& x) { return truncation_h(x)[idx]; });
    }
    return out;
}

rvec JumpMeasureSpec::mean_vector() const {
    rvec out(dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t idx = i;
        out[i] = integrate([idx](const rvec& x) { return x[idx]; });
    }
    return out;
}

double JumpMeasureSpec::big_m(const StateSpaceShape& shape, std::size_t i) const {
    // i = 0 keeps I and J as they are; i >= 1 moves coordinate i from I to J.
    return integrate([&](const rvec& x) {
        const rvec h = truncation_h(x);
        double v = 0.0;
        for (std::size_t k = 0; k < shape.d(); ++k) {
            const bool in_I = shape.is_nonneg_coord(k) && (i == 0 || k != i - 1);
            if (in_I)
                v += h[k];
            else
                v += h[k] * h[k];
        }
        return v;
    });
}

bool JumpMeasureSpec::supported_on(const StateSpaceShape& shape, std::string* why) const {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (const auto& c : components_) {
        if (const auto* p = std::get_if<PointMass>(&c)) {
            if (!shape.contains(p->x)) return fail("point mass outside D");
            if (norm2(p->x) == 0.0) return fail("point mass at the origin");
        } else if (const auto* p = std::get_if<GaussianAxis>(&c)) {
            if (shape.is_nonneg_coord(p->axis) && !p->restrict_to_D)
                return fail("unrestricted Gaussian on a nonnegative axis");
            if (!p->offset.empty() && !shape.contains(p->offset))
                return fail("Gaussian offset outside D");
        } else if (const auto* p = std::get_if<ExponentialAxis>(&c)) {
            if (!shape.is_nonneg_coord(p->axis))
                return fail("exponential component on a real axis");
        } else if (const auto* p = std::get_if<NumericDensity>(&c)) {
            for (std::size_t k = 0; k < shape.m && k < p->lo.size(); ++k)
                if (p->lo[k] < 0.0) return fail("numeric density box leaves D");
        }
    }
    return true;
}

}  // namespace ajk
