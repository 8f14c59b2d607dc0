#include "ajk/termstructure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ajk/errors.hpp"
#include "ajk/quadrature.hpp"

namespace ajk {

namespace {

double detail_pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t h = n / 2;
    return detail_pairwise_sum(v, h) + detail_pairwise_sum(v + h, n - h);
}

double psi_beta(double beta, double x) { return (std::exp(beta * x) - 1.0) / beta; }

// int_pa^pb e^{beta (v - s)} ds
double int_exp(double beta, double pa, double pb, double v) {
    return (std::exp(beta * (v - pa)) - std::exp(beta * (v - pb))) / beta;
}

// Exact joint OU transition for (r, int r): X = (A_t, R_t, r_t).
class TsSimulator : public Simulator {
public:
    TsSimulator(double alpha, double beta, double sigma, double gamma_jump,
                std::vector<double> jump_times)
        : alpha_(alpha), beta_(beta), sigma_(sigma), gamma_(gamma_jump),
          jump_times_(std::move(jump_times)) {}

    void step(double t0, double t1, rvec& x, Rng& rng) const override {
        const double dt = t1 - t0;
        const double e = std::exp(beta_ * dt);
        const double psi = psi_beta(beta_, dt);
        const double r = x[2], R = x[1];
        const double mean_r = e * r + alpha_ * psi;
        const double mean_R = R + r * psi + alpha_ * (psi - dt) / beta_;
        double g1 = 0.0, g2 = 0.0;
        if (sigma_ > 0.0) {
            const double s2 = sigma_ * sigma_;
            const double v_rr = s2 * (e * e - 1.0) / (2.0 * beta_);
            const double v_rR = s2 / beta_ * ((e * e - 1.0) / (2.0 * beta_) - psi);
            const double v_RR = s2 / (beta_ * beta_) *
                                ((e * e - 1.0) / (2.0 * beta_) - 2.0 * psi + dt);
            const double l11 = std::sqrt(v_rr);
            const double l21 = v_rR / l11;
            const double l22 = std::sqrt(std::max(0.0, v_RR - l21 * l21));
            const double z1 = rng.normal(), z2 = rng.normal();
            g1 = l11 * z1;
            g2 = l21 * z1 + l22 * z2;
        }
        x[2] = mean_r + g1;
        x[1] = mean_R + g2;
        double atoms = 0.0;
        for (double ti : jump_times_)
            if (ti <= t1) atoms += 1.0;
        x[0] = t1 + atoms;
    }

    void atom_jump(double, rvec& x, Rng& rng) const override {
        if (gamma_ > 0.0) x[2] += rng.normal(0.0, gamma_);
        // the A-coordinate jump is already part of x[0] = A_{t}
    }

private:
    double alpha_, beta_, sigma_, gamma_;
    std::vector<double> jump_times_;
};

ModelSpec build_x_model(LoadingKind kind, double alpha, double beta, double sigma,
                        double gamma_jump, const std::vector<double>& jump_times,
                        double horizon) {
    StateSpaceShape shape{0, 3};
    auto betas = zero_betas(3);
    betas[0] = const_vec({1.0, 0.0, alpha});
    betas[3] = const_vec({0.0, 1.0, beta});
    auto alphas = zero_alphas(3);
    rmat a0(3);
    a0(2, 2) = sigma * sigma;
    alphas[0] = const_mat(a0);

    std::vector<Atom> atoms;
    std::map<double, GammaForm> gm;
    if (kind == LoadingKind::Discontinuous) {
        for (double ti : jump_times) {
            atoms.push_back({ti, 1.0});
            EnhancedGamma eg;
            eg.beta.assign(4, rvec(3, 0.0));
            eg.beta[0] = {1.0, 0.0, 0.0};
            eg.alpha.assign(4, rmat(3));
            eg.alpha[0](2, 2) = gamma_jump * gamma_jump;
            eg.mu.assign(4, JumpMeasureSpec::empty(3));
            gm.emplace(ti, eg);
        }
    }
    AffineParameterSet params(shape,
                              atoms.empty() ? DriverMeasure::lebesgue(horizon)
                                            : DriverMeasure::lebesgue_with_atoms(horizon, atoms),
                              std::move(betas), std::move(alphas), empty_mus(3), std::move(gm));
    ModelSpec spec{"term-structure-driver", std::move(params), std::nullopt,
                   std::make_shared<TsSimulator>(alpha, beta, sigma, gamma_jump, jump_times),
                   false};
    return spec;
}

}  // namespace

TermStructureModel TermStructureModel::make(LoadingKind kind, double alpha, double beta,
                                            double sigma, double gamma_jump,
                                            std::vector<double> jump_times, double r0,
                                            double horizon, double a1_scale,
                                            std::function<double(double)> f0_custom) {
    if (beta == 0.0) throw InvalidParameter("term structure: beta must be nonzero");
    if (kind == LoadingKind::Discontinuous) {
        if (!(gamma_jump > 0.0))
            throw InvalidParameter("discontinuous term structure: gamma must be > 0");
        for (std::size_t i = 0; i + 1 < jump_times.size(); ++i)
            if (!(jump_times[i] < jump_times[i + 1]))
                throw InvalidTimes("term structure: jump times must be strictly increasing");
        if (!jump_times.empty() && jump_times.back() > horizon)
            throw InvalidTimes("term structure: jump time beyond horizon");
    } else {
        jump_times.clear();
        gamma_jump = 0.0;
    }
    TermStructureModel m;
    m.kind = kind;
    m.alpha = alpha;
    m.beta = beta;
    m.sigma = sigma;
    m.gamma_jump = gamma_jump;
    m.jump_times = jump_times;
    m.r0 = r0;
    m.horizon = horizon;
    m.a1_scale = a1_scale;
    m.f0_custom_ = std::move(f0_custom);
    m.x_model_ = build_x_model(kind, alpha, beta, sigma, gamma_jump, m.jump_times, horizon);
    return m;
}

double TermStructureModel::a3_closed(double t, double T) const {
    double count = 0.0;
    for (double ti : jump_times)
        if (ti >= t && ti <= T) count += 1.0;
    return psi_beta(beta, T - t) + count;
}

rvec TermStructureModel::A_field(double t, double T) const {
    if (T < t) throw OutOfDomain("A_field: requires t <= T");
    if (kind == LoadingKind::Gaussian) {
        const double tau = T - t;
        return {a1_scale * (0.5 * sigma * sigma * tau * tau - alpha * tau), -beta * tau, tau};
    }
    const double A3 = a3_closed(t, T);
    const bool at_atom =
        std::find(jump_times.begin(), jump_times.end(), t) != jump_times.end();
    const double A1 = at_atom ? a1_scale * 0.5 * gamma_jump * gamma_jump * A3 * A3
                              : a1_scale * (0.5 * sigma * sigma * A3 * A3 - alpha * A3);
    return {A1, -beta * A3, A3};
}

double TermStructureModel::det_density(double t, double v) const {
    if (kind == LoadingKind::Gaussian)
        return a1_scale * (sigma * sigma * (v * t - 0.5 * t * t) - alpha * t);

    // pieces of [0, t] split at jump times; on each piece the closed-interval
    // atom count in A^3(s, v) is constant
    std::vector<double> cuts{0.0};
    for (double ti : jump_times)
        if (ti > 0.0 && ti < t) cuts.push_back(ti);
    cuts.push_back(t);

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double pa = cuts[i], pb = cuts[i + 1];
        if (!(pb > pa)) continue;
        const double smid = 0.5 * (pa + pb);
        double count = 0.0;
        for (double ti : jump_times)
            if (ti >= smid && ti <= v) count += 1.0;
        const double D = int_exp(beta, pa, pb, v);
        const double D2 = (std::exp(2.0 * beta * (v - pa)) - std::exp(2.0 * beta * (v - pb))) /
                          (2.0 * beta);
        const double ipsi = (D2 - D) / beta;  // int psi_beta(v-s) e^{beta(v-s)} ds
        acc += sigma * sigma * (ipsi + count * D) - alpha * D;
    }
    // atom contributions of the s-accumulation: a^1(t_j, v) = gamma^2 A^3(t_j, v) e^{beta(v-t_j)}
    for (double tj : jump_times) {
        if (tj <= t)
            acc += gamma_jump * gamma_jump * a3_closed(tj, v) * std::exp(beta * (v - tj));
    }
    return a1_scale * acc;
}

double TermStructureModel::det_atom(double t, double ti) const {
    if (kind == LoadingKind::Gaussian) return 0.0;
    // v-atom slice of the accumulated a^1 loadings at maturity ti
    std::vector<double> cuts{0.0};
    for (double tj : jump_times)
        if (tj > 0.0 && tj < t) cuts.push_back(tj);
    cuts.push_back(t);

    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double pa = cuts[i], pb = cuts[i + 1];
        if (!(pb > pa)) continue;
        const double smid = 0.5 * (pa + pb);
        double count = 0.0;  // atoms in [s, ti)
        for (double tj : jump_times)
            if (tj >= smid && tj < ti) count += 1.0;
        // int (sigma^2/2 (2 A^3(s, ti-) + 1) - alpha) ds on the piece
        const double ipsi = (int_exp(beta, pa, pb, ti) - (pb - pa)) / beta;
        acc += sigma * sigma * (ipsi + (count + 0.5) * (pb - pa)) - alpha * (pb - pa);
    }
    for (double tj : jump_times) {
        if (tj > t) continue;
        double count = 0.0;
        for (double tk : jump_times)
            if (tk >= tj && tk < ti) count += 1.0;
        const double a3_left = psi_beta(beta, ti - tj) + count;
        acc += 0.5 * gamma_jump * gamma_jump * (2.0 * a3_left + 1.0);
    }
    return a1_scale * acc;
}

double TermStructureModel::f0_value(double v) const {
    if (f0_custom_) return f0_custom_(v);
    if (kind == LoadingKind::Gaussian) return r0;
    // implied initial curve: makes f(t,t) = r_t exact
    return std::exp(beta * v) * r0 - det_density(v, v);
}

double TermStructureModel::forward_density(double t, double v, double r, double R) const {
    if (kind == LoadingKind::Gaussian)
        return f0_value(v) + det_density(t, v) + (r - r0) - beta * R;
    return f0_value(v) + det_density(t, v) + std::exp(beta * (v - t)) * r -
           std::exp(beta * v) * r0;
}

double TermStructureModel::forward_atom(double t, double ti, double r, double R) const {
    if (kind == LoadingKind::Gaussian) throw NotAnAtom("gaussian family has no atoms");
    if (std::find(jump_times.begin(), jump_times.end(), ti) == jump_times.end())
        throw NotAnAtom("forward_atom: ti is not an atom");
    return f0_value(ti) + det_atom(t, ti) + (r - r0) - beta * R;
}

double TermStructureModel::short_rate(double t, double r, double R) const {
    return forward_density(t, t, r, R);
}

TermStructureModel::BondCoeffs TermStructureModel::bond_coeffs(double t, double T) const {
    if (T < t) throw OutOfDomain("bond_coeffs: requires t <= T");
    BondCoeffs c;
    if (T == t) return c;

    QuadratureOptions q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-12;

    if (kind == LoadingKind::Gaussian) {
        const double tau = T - t;
        c.c_r = tau;
        c.c_R = -beta * tau;
        auto g = [&](double v) { return cplx{f0_value(v) + det_density(t, v) - r0, 0.0}; };
        c.c0 = gauss_kronrod<cplx>(g, t, T, q).real();
        return c;
    }

    std::vector<double> open_atoms;
    for (double ti : jump_times)
        if (ti > t && ti <= T) open_atoms.push_back(ti);

    c.c_r = psi_beta(beta, T - t) + static_cast<double>(open_atoms.size());
    c.c_R = -beta * static_cast<double>(open_atoms.size());

    // dv-part, split at atoms where the accumulated loadings jump in v
    std::vector<double> cuts{t};
    cuts.insert(cuts.end(), open_atoms.begin(), open_atoms.end());
    cuts.push_back(T);
    double c0 = 0.0;
    auto g = [&](double v) {
        return cplx{f0_value(v) + det_density(t, v) - std::exp(beta * v) * r0, 0.0};
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (cuts[i + 1] > cuts[i]) c0 += gauss_kronrod<cplx>(g, cuts[i], cuts[i + 1], q).real();
    for (double ti : open_atoms) c0 += f0_value(ti) + det_atom(t, ti) - r0;
    c.c0 = c0;
    return c;
}

double TermStructureModel::bond_price(double t, double T, double r, double R) const {
    const BondCoeffs c = bond_coeffs(t, T);
    return std::exp(-(c.c0 + c.c_r * r + c.c_R * R));
}

double TermStructureModel::numeraire_log(const PathEnsemble& e, std::size_t path,
                                         std::size_t k) const {
    const double t = e.grid[k];
    if (kind == LoadingKind::Gaussian) {
        // trapezoid of the short rate against du
        double acc = 0.0;
        for (std::size_t j = 0; j + 1 <= k; ++j) {
            const double t0 = e.grid[j], t1 = e.grid[j + 1];
            const double f0v = short_rate(t0, e.state(path, j, 2), e.state(path, j, 1));
            const double f1v = short_rate(t1, e.state(path, j + 1, 2), e.state(path, j + 1, 1));
            acc += 0.5 * (f0v + f1v) * (t1 - t0);
        }
        return acc;
    }
    // implied f0 makes the du-part equal R_t; atoms add f(t_i, t_i) dA
    double acc = e.state(path, k, 1);
    for (double ti : jump_times) {
        if (ti > t) break;
        const std::size_t ki = e.grid_index(ti);
        acc += forward_atom(ti, ti, e.state(path, ki, 2), e.state(path, ki, 1));
    }
    return acc;
}

TermStructureModel vasicek_term_structure(double alpha, double beta, double sigma, double r0,
                                          double horizon, double a1_scale) {
    return TermStructureModel::make(LoadingKind::Vasicek, alpha, beta, sigma, 0.0, {}, r0,
                                    horizon, a1_scale, nullptr);
}

TermStructureModel gaussian_term_structure(double alpha, double beta, double sigma, double r0,
                                           double horizon, double a1_scale,
                                           std::function<double(double)> f0) {
    return TermStructureModel::make(LoadingKind::Gaussian, alpha, beta, sigma, 0.0, {}, r0,
                                    horizon, a1_scale, std::move(f0));
}

TermStructureModel discontinuous_term_structure(double alpha, double beta, double sigma,
                                                double gamma_jump, std::vector<double> jump_times,
                                                double r0, double horizon, double a1_scale) {
    return TermStructureModel::make(LoadingKind::Discontinuous, alpha, beta, sigma, gamma_jump,
                                    std::move(jump_times), r0, horizon, a1_scale, nullptr);
}

std::function<rvec(double, double)> vasicek_loadings(double alpha, double beta, double sigma) {
    auto m = vasicek_term_structure(alpha, beta, sigma, 0.0, 1e9);
    return [m](double t, double T) { return m.A_field(t, T); };
}

std::function<rvec(double, double)> gaussian_loadings(double alpha, double sigma, double beta) {
    auto m = gaussian_term_structure(alpha, beta, sigma, 0.0, 1e9);
    return [m](double t, double T) { return m.A_field(t, T); };
}

std::function<rvec(double, double)> discontinuous_loadings(double alpha, double beta,
                                                           double sigma, double gamma_jump,
                                                           std::vector<double> jump_times) {
    const double horizon = jump_times.empty() ? 1e9 : jump_times.back() + 1e9;
    auto m = discontinuous_term_structure(alpha, beta, sigma, gamma_jump, std::move(jump_times),
                                          0.0, horizon);
    return [m](double t, double T) { return m.A_field(t, T); };
}

double drift_residual(const TermStructureModel& m, double t, double T) {
    if (t > T) throw OutOfDomain("drift_residual: requires t <= T");
    const rvec A = m.A_field(t, T);
    const bool at_atom = m.kind == LoadingKind::Discontinuous &&
                         std::find(m.jump_times.begin(), m.jump_times.end(), t) !=
                             m.jump_times.end();
    double worst = 0.0;
    if (at_atom) {
        // atom-time condition: A b = int (e^{-A x} - 1 + A x) K(dx) with the
        // kernel delta_1 (x) N(0, gamma^2) on (dA, dR, dr)
        const rvec b0{1.0, 0.0, 0.0};
        JumpMeasureSpec K(3, {GaussianAxis{2, 0.0, m.gamma_jump, {1.0, 0.0, 0.0}, 1.0, false}});
        cvec w(3);
        for (int c = 0; c < 3; ++c) w[c] = cplx{-A[c], 0.0};
        const cplx integral = K.exp_integral_untruncated(w);
        worst = std::abs(dot(A, b0) - integral.real());
        // indices 1..3 carry no atom characteristics
        return worst;
    }
    // continuous-time condition per index: A b_i = 1/2 A c_i A^T (mu_i = 0)
    const rvec b0{1.0, 0.0, m.alpha};
    const rvec b3{0.0, 1.0, m.beta};
    const double quad = 0.5 * m.sigma * m.sigma * A[2] * A[2];
    worst = std::abs(dot(A, b0) - quad);
    worst = std::max(worst, std::abs(dot(A, b3)));
    return worst;
}

DriftConditionReport verify_drift_condition(const TermStructureModel& m, int n_pairs,
                                            std::uint64_t seed) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double span = std::min(m.horizon, 5.0);
    DriftConditionReport rep;
    auto probe = [&](double t, double T) {
        const double res = drift_residual(m, t, T);
        if (res > rep.max_residual) {
            rep.max_residual = res;
            rep.worst_t = t;
            rep.worst_T = T;
        }
    };
    for (int i = 0; i < n_pairs; ++i) {
        double t = span * unif(rng), T = span * unif(rng);
        if (t > T) std::swap(t, T);
        probe(t, T);
    }
    for (double ti : m.jump_times) {
        if (ti > span) continue;
        for (int i = 0; i < 8; ++i) probe(ti, ti + (span - ti) * unif(rng));
    }
    rep.pass = rep.max_residual < 1e-8;
    return rep;
}

BondMartingaleReport martingale_test(const TermStructureModel& m, double T, std::size_t n_paths,
                                     std::uint64_t seed, const MartingaleTestOptions& opt) {
    BondMartingaleReport rep;
    const auto drift = verify_drift_condition(m, 100, seed ^ 0x9E3779B97F4A7C15ull);
    rep.drift_precondition_ok = drift.pass;
    rep.max_drift_residual = drift.max_residual;

    SimulateOptions sopt;
    sopt.grid_points = std::max<std::size_t>(
        opt.sim_grid_points, m.kind == LoadingKind::Gaussian ? 512 : opt.sim_grid_points);
    sopt.threads = opt.threads;
    const PathEnsemble e = simulate(m.x_model(), {0.0, 0.0, m.r0}, T, n_paths, seed, sopt);

    const std::size_t G = e.grid.size();
    const std::size_t stride = std::max<std::size_t>(1, G / std::max<std::size_t>(1, opt.eval_points));
    std::vector<std::size_t> eval;
    for (std::size_t k = 0; k < G; k += stride) eval.push_back(k);
    if (eval.back() != G - 1) eval.push_back(G - 1);

    const auto c00 = m.bond_coeffs(0.0, T);
    const double p0 = std::exp(-(c00.c0 + c00.c_r * m.r0));

    std::vector<double> vals(e.n_paths), dev(e.n_paths);
    for (std::size_t idx : eval) {
        const double t = e.grid[idx];
        const auto c = m.bond_coeffs(t, T);
        for (std::size_t pth = 0; pth < e.n_paths; ++pth) {
            const double r = e.state(pth, idx, 2), R = e.state(pth, idx, 1);
            vals[pth] =
                std::exp(-(c.c0 + c.c_r * r + c.c_R * R) - m.numeraire_log(e, pth, idx));
        }
        const std::size_t n = e.n_paths;
        const double mean = detail_pairwise_sum(vals.data(), n) / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) dev[i] = (vals[i] - mean) * (vals[i] - mean);
        const double var =
            n > 1 ? detail_pairwise_sum(dev.data(), n) / static_cast<double>(n - 1) : 0.0;
        const double se = std::sqrt(var / static_cast<double>(n));
        const double diff = std::abs(mean - p0);
        rep.times.push_back(t);
        rep.z.push_back(diff / std::max(se, 1e-14 * (1.0 + p0)));
    }
    for (double z : rep.z) rep.max_z = std::max(rep.max_z, z);
    rep.pass = rep.drift_precondition_ok && rep.max_z <= 4.0;
    return rep;
}

}  // namespace ajk
