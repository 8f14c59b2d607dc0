#include "ajk/models.hpp"

#include <algorithm>
#include <cmath>

#include "ajk/errors.hpp"

namespace ajk {

namespace {

cplx poisson_phi(double lambda, double s, double t, const cplx& u) {
    return lambda * (t - s) * (std::exp(u) - 1.0);
}

class ConstSim : public Simulator {
public:
    void step(double, double, rvec&, Rng&) const override {}
    void atom_jump(double, rvec&, Rng&) const override {}
};

class PoissonSim : public Simulator {
public:
    explicit PoissonSim(double lambda) : lambda_(lambda) {}
    void step(double t0, double t1, rvec& x, Rng& rng) const override {
        x[0] += static_cast<double>(rng.poisson(lambda_ * (t1 - t0)));
    }
    void atom_jump(double, rvec&, Rng&) const override {}

private:
    double lambda_;
};

class PoissonJumpSim : public Simulator {
public:
    explicit PoissonJumpSim(double lambda) : lambda_(lambda) {}
    void step(double t0, double t1, rvec& x, Rng& rng) const override {
        x[0] += static_cast<double>(rng.poisson(lambda_ * (t1 - t0)));
    }
    void atom_jump(double, rvec& x, Rng& rng) const override {
        const double sign = rng.bernoulli(0.5) ? 1.0 : -1.0;
        x[0] += sign + rng.normal() * std::sqrt(std::max(x[0], 0.0));
    }

private:
    double lambda_;
};

class DiscretePoissonSim : public Simulator {
public:
    explicit DiscretePoissonSim(std::vector<double> p) : p_(std::move(p)) {}
    void step(double, double, rvec&, Rng&) const override {}
    void atom_jump(double t, rvec& x, Rng& rng) const override {
        const auto n = static_cast<std::size_t>(std::lround(t));
        if (n >= 1 && n <= p_.size() && rng.bernoulli(p_[n - 1])) x[0] += 1.0;
    }

private:
    std::vector<double> p_;
};

class OuSim : public Simulator {
public:
    OuSim(double alpha, double beta, double sigma, double jump_sd)
        : alpha_(alpha), beta_(beta), sigma_(sigma), jump_sd_(jump_sd) {}
    void step(double t0, double t1, rvec& x, Rng& rng) const override {
        const double dt = t1 - t0;
        const double e = std::exp(beta_ * dt);
        const double mean = e * x[0] + alpha_ * (e - 1.0) / beta_;
        const double var = sigma_ * sigma_ * (std::exp(2.0 * beta_ * dt) - 1.0) / (2.0 * beta_);
        x[0] = var > 0.0 ? rng.normal(mean, std::sqrt(var)) : mean;
    }
    void atom_jump(double, rvec& x, Rng& rng) const override {
        if (jump_sd_ > 0.0) x[0] += rng.normal(0.0, jump_sd_);
    }

private:
    double alpha_, beta_, sigma_, jump_sd_;
};

class Ar1Sim : public Simulator {
public:
    Ar1Sim(std::vector<double> sched, std::function<double(Rng&)> sampler)
        : sched_(std::move(sched)), sampler_(std::move(sampler)) {}
    void step(double, double, rvec&, Rng&) const override {}
    void atom_jump(double t, rvec& x, Rng& rng) const override {
        const auto n = static_cast<std::size_t>(std::lround(t));
        if (n >= 1 && n <= sched_.size()) x[0] = sched_[n - 1] * x[0] + sampler_(rng);
    }

private:
    std::vector<double> sched_;
    std::function<double(Rng&)> sampler_;
};

std::vector<Atom> unit_atoms_at_integers(std::size_t count) {
    std::vector<Atom> atoms;
    for (std::size_t n = 1; n <= count; ++n) atoms.push_back({static_cast<double>(n), 1.0});
    return atoms;
}

}  // namespace

ModelSpec zero_model(std::size_t m, std::size_t n, double horizon) {
    StateSpaceShape shape{m, n};
    auto params = AffineParameterSet::zero(shape, DriverMeasure::lebesgue(horizon));
    ClosedForm cf = [](double, double, const cvec& u) {
        return std::make_pair(cplx{0.0, 0.0}, u);
    };
    return {"zero", std::move(params), cf, std::make_shared<ConstSim>(), false};
}

ModelSpec poisson_process(double lambda, double horizon) {
    if (!(lambda > 0.0)) throw InvalidRate("poisson: rate must be > 0");
    StateSpaceShape shape{1, 0};
    std::vector<TimeVec> beta = zero_betas(1);
    beta[0] = const_vec({lambda});  // compensated drift, h covers the unit jump
    std::vector<TimeJump> mu = empty_mus(1);
    mu[0] = const_jump(JumpMeasureSpec(1, {PointMass{{1.0}, lambda}}));
    AffineParameterSet params(shape, DriverMeasure::lebesgue(horizon), std::move(beta),
                              zero_alphas(1), std::move(mu), {});
    ClosedForm cf = [lambda](double s, double t, const cvec& u) {
        return std::make_pair(poisson_phi(lambda, s, t, u[0]), u);
    };
    return {"poisson", std::move(params), cf, std::make_shared<PoissonSim>(lambda), false};
}

ModelSpec poisson_with_normal_jump(double lambda, double tau, double horizon) {
    if (!(lambda > 0.0)) throw InvalidRate("poisson-jump: rate must be > 0");
    if (!(tau > 0.0)) throw InvalidTimes("poisson-jump: tau must be > 0");
    horizon = std::max(horizon, tau);
    StateSpaceShape shape{0, 1};
    std::vector<TimeVec> beta = zero_betas(1);
    beta[0] = const_vec({lambda});
    std::vector<TimeJump> mu = empty_mus(1);
    mu[0] = const_jump(JumpMeasureSpec(1, {PointMass{{1.0}, lambda}}));

    TableGamma gamma;
    gamma.map = [](const cvec& u) {
        const cplx g0 = std::log(std::cosh(u[0]));
        return std::make_pair(g0, cvec{0.5 * u[0] * u[0]});
    };
    std::map<double, GammaForm> gm;
    gm.emplace(tau, gamma);

    AffineParameterSet params(shape, DriverMeasure::lebesgue_with_atoms(horizon, {{tau, 1.0}}),
                              std::move(beta), zero_alphas(1), std::move(mu), std::move(gm));
    ClosedForm cf = [lambda, tau](double s, double t, const cvec& uu) {
        const cplx u = uu[0];
        if (s < tau && tau <= t) {
            const cplx psi = u + 0.5 * u * u;
            const cplx phi = poisson_phi(lambda, tau, t, u) + std::log(std::cosh(u)) +
                             lambda * (tau - s) * (std::exp(psi) - 1.0);
            return std::make_pair(phi, cvec{psi});
        }
        return std::make_pair(poisson_phi(lambda, s, t, u), cvec{u});
    };
    return {"poisson-jump", std::move(params), cf, std::make_shared<PoissonJumpSim>(lambda), true};
}

ModelSpec discrete_poisson(const std::vector<double>& p_schedule) {
    if (p_schedule.empty()) throw InvalidProbability("discrete-poisson: empty schedule");
    for (double p : p_schedule)
        if (!(p > 0.0 && p < 1.0))
            throw InvalidProbability("discrete-poisson: probabilities must lie in (0,1)");
    const std::size_t N = p_schedule.size();
    StateSpaceShape shape{1, 0};

    std::map<double, GammaForm> gm;
    for (std::size_t n = 1; n <= N; ++n) {
        const double p = p_schedule[n - 1];
        TableGamma g;
        g.map = [p](const cvec& u) {
            const cplx g0 = u[0] + std::log(p + std::exp(-u[0]) * (1.0 - p));
            return std::make_pair(g0, cvec{cplx{0.0, 0.0}});
        };
        gm.emplace(static_cast<double>(n), g);
    }
    AffineParameterSet params(shape,
                              DriverMeasure::pure_atoms(static_cast<double>(N),
                                                        unit_atoms_at_integers(N)),
                              zero_betas(1), zero_alphas(1), empty_mus(1), std::move(gm));
    const std::vector<double> sched = p_schedule;
    ClosedForm cf = [sched](double s, double t, const cvec& uu) {
        const cplx u = uu[0];
        cplx phi{0.0, 0.0};
        for (std::size_t n = 1; n <= sched.size(); ++n) {
            const double tn = static_cast<double>(n);
            if (tn > s && tn <= t)
                phi += u + std::log(sched[n - 1] + std::exp(-u) * (1.0 - sched[n - 1]));
        }
        return std::make_pair(phi, cvec{u});
    };
    return {"discrete-poisson", std::move(params), cf,
            std::make_shared<DiscretePoissonSim>(p_schedule), false};
}

ModelSpec vasicek(double alpha, double beta, double sigma, double horizon) {
    if (beta == 0.0) throw InvalidParameter("vasicek: beta must be nonzero");
    StateSpaceShape shape{0, 1};
    std::vector<TimeVec> b = zero_betas(1);
    b[0] = const_vec({alpha});
    b[1] = const_vec({beta});
    std::vector<TimeMat> a = zero_alphas(1);
    rmat a0(1);
    a0(0, 0) = sigma * sigma;
    a[0] = const_mat(a0);
    AffineParameterSet params(shape, DriverMeasure::lebesgue(horizon), std::move(b), std::move(a),
                              empty_mus(1), {});
    ClosedForm cf = [alpha, beta, sigma](double s, double t, const cvec& uu) {
        const cplx u = uu[0];
        const double e = std::exp(beta * (t - s));
        const cplx psi = u * e;
        const cplx phi = alpha * u * (e - 1.0) / beta +
                         sigma * sigma * u * u * (e * e - 1.0) / (4.0 * beta);
        return std::make_pair(phi, cvec{psi});
    };
    return {"vasicek", std::move(params), cf, std::make_shared<OuSim>(alpha, beta, sigma, 0.0),
            false};
}

ModelSpec discontinuous_vasicek(double alpha, double beta, double sigma, double gamma_jump,
                                const std::vector<double>& jump_times, double horizon) {
    if (beta == 0.0) throw InvalidParameter("discontinuous-vasicek: beta must be nonzero");
    if (!(gamma_jump > 0.0)) throw InvalidParameter("discontinuous-vasicek: gamma must be > 0");
    for (std::size_t i = 0; i + 1 < jump_times.size(); ++i)
        if (!(jump_times[i] < jump_times[i + 1]))
            throw InvalidTimes("discontinuous-vasicek: jump times must be strictly increasing");
    if (!jump_times.empty()) horizon = std::max(horizon, jump_times.back());

    StateSpaceShape shape{0, 1};
    std::vector<TimeVec> b = zero_betas(1);
    b[0] = const_vec({alpha});
    b[1] = const_vec({beta});
    std::vector<TimeMat> a = zero_alphas(1);
    rmat a0(1);
    a0(0, 0) = sigma * sigma;
    a[0] = const_mat(a0);

    std::vector<Atom> atoms;
    std::map<double, GammaForm> gm;
    for (double ti : jump_times) {
        if (!(ti > 0.0)) throw InvalidTimes("discontinuous-vasicek: jump times must be > 0");
        atoms.push_back({ti, 1.0});
        // Independent N(0, gamma^2) shock: gamma_0(t,u) = gamma^2 u^2 / 2 in
        // enhanced (pure diffusion) form; the state transform is trivial.
        EnhancedGamma eg;
        eg.beta = {rvec{0.0}, rvec{0.0}};
        rmat g0(1);
        g0(0, 0) = gamma_jump * gamma_jump;
        eg.alpha = {g0, rmat(1)};
        eg.mu = {JumpMeasureSpec::empty(1), JumpMeasureSpec::empty(1)};
        gm.emplace(ti, eg);
    }

    AffineParameterSet params(shape, DriverMeasure::lebesgue_with_atoms(horizon, atoms),
                              std::move(b), std::move(a), empty_mus(1), std::move(gm));
    const std::vector<double> times = jump_times;
    ClosedForm cf = [alpha, beta, sigma, gamma_jump, times](double s, double t, const cvec& uu) {
        const cplx u = uu[0];
        const double e = std::exp(beta * (t - s));
        const cplx psi = u * e;
        cplx phi = alpha * u * (e - 1.0) / beta +
                   sigma * sigma * u * u * (e * e - 1.0) / (4.0 * beta);
        for (double ti : times) {
            if (ti > s && ti <= t) {
                const cplx psi_ti = u * std::exp(beta * (t - ti));
                phi += 0.5 * gamma_jump * gamma_jump * psi_ti * psi_ti;
            }
        }
        return std::make_pair(phi, cvec{psi});
    };
    return {"discontinuous-vasicek", std::move(params), cf,
            std::make_shared<OuSim>(alpha, beta, sigma, gamma_jump), false};
}

ModelSpec cir_type(double kappa, double sigma, double a0, double horizon) {
    if (kappa < 0.0 || sigma < 0.0 || a0 < 0.0)
        throw InvalidParameter("cir: parameters must be nonnegative");
    StateSpaceShape shape{1, 0};
    std::vector<TimeVec> b = zero_betas(1);
    b[0] = const_vec({a0});
    b[1] = const_vec({-kappa});
    std::vector<TimeMat> a = zero_alphas(1);
    rmat a1(1);
    a1(0, 0) = sigma * sigma;
    a[1] = const_mat(a1);
    AffineParameterSet params(shape, DriverMeasure::lebesgue(horizon), std::move(b), std::move(a),
                              empty_mus(1), {});
    ClosedForm cf = [kappa, sigma, a0](double s, double t, const cvec& uu) {
        const cplx u = uu[0];
        const double tau = t - s;
        cplx psi, phi;
        const double ek = std::exp(-kappa * tau);
        // (1 - e^{-kappa tau}) / kappa with the kappa -> 0 limit
        const double w = std::abs(kappa) < 1e-14 ? tau : (1.0 - ek) / kappa;
        const cplx denom = 1.0 - 0.5 * sigma * sigma * u * w;
        psi = u * ek / denom;
        if (sigma > 0.0) {
            phi = -(2.0 * a0 / (sigma * sigma)) * std::log(denom);
        } else {
            phi = a0 * u * w;
        }
        return std::make_pair(phi, cvec{psi});
    };
    return {"cir", std::move(params), cf, nullptr, false};
}

ModelSpec ar1_embed(const std::vector<double>& alpha_schedule,
                    const std::function<cplx(const cplx&)>& noise_logcf,
                    std::function<double(Rng&)> noise_sampler) {
    if (alpha_schedule.empty()) throw InvalidNoise("ar1: empty schedule");
    if (std::abs(noise_logcf(cplx{0.0, 0.0})) > 1e-14)
        throw InvalidNoise("ar1: noise log-characteristic function must vanish at 0");
    const std::size_t N = alpha_schedule.size();
    StateSpaceShape shape{0, 1};

    std::map<double, GammaForm> gm;
    for (std::size_t n = 1; n <= N; ++n) {
        const double an = alpha_schedule[n - 1];
        TableGamma g;
        g.map = [an, noise_logcf](const cvec& u) {
            // Crossing atom n backward: psi -> alpha(n) psi, phi += log E e^{psi eps}.
            return std::make_pair(noise_logcf(u[0]), cvec{(an - 1.0) * u[0]});
        };
        gm.emplace(static_cast<double>(n), g);
    }
    AffineParameterSet params(shape,
                              DriverMeasure::pure_atoms(static_cast<double>(N),
                                                        unit_atoms_at_integers(N)),
                              zero_betas(1), zero_alphas(1), empty_mus(1), std::move(gm));
    const std::vector<double> sched = alpha_schedule;
    ClosedForm cf = [sched, noise_logcf](double s, double t, const cvec& uu) {
        cplx psi = uu[0];
        cplx phi{0.0, 0.0};
        for (std::size_t n = sched.size(); n >= 1; --n) {
            const double tn = static_cast<double>(n);
            if (tn > s && tn <= t) {
                phi += noise_logcf(psi);
                psi *= sched[n - 1];
            }
        }
        return std::make_pair(phi, cvec{psi});
    };
    std::shared_ptr<const Simulator> sim;
    if (noise_sampler) sim = std::make_shared<Ar1Sim>(alpha_schedule, std::move(noise_sampler));
    return {"ar1", std::move(params), cf, sim, false};
}

std::vector<std::string> catalog_names() {
    return {"zero",    "poisson", "poisson-jump",          "discrete-poisson",
            "vasicek", "cir",     "discontinuous-vasicek", "ar1"};
}

ModelSpec make_catalog_model(const std::string& name, const CatalogArgs& args) {
    const double horizon = args.get("horizon", 10.0);
    if (name == "zero") {
        return zero_model(static_cast<std::size_t>(args.get("m", 0)),
                          static_cast<std::size_t>(args.get("n", 1)), horizon);
    }
    if (name == "poisson") return poisson_process(args.get("lambda", 1.0), horizon);
    if (name == "poisson-jump")
        return poisson_with_normal_jump(args.get("lambda", 1.0), args.get("tau", 1.0), horizon);
    if (name == "discrete-poisson") {
        std::vector<double> p;
        auto it = args.lists.find("p");
        if (it != args.lists.end()) {
            p = it->second;
        } else {
            const double pv = args.get("p", 0.5);
            p.assign(static_cast<std::size_t>(args.get("steps", 8)), pv);
        }
        return discrete_poisson(p);
    }
    if (name == "vasicek")
        return vasicek(args.get("alpha", 0.01), args.get("beta", -0.5), args.get("sigma", 0.2),
                       horizon);
    if (name == "discontinuous-vasicek") {
        std::vector<double> times{1.0};
        auto it = args.lists.find("jump-times");
        if (it != args.lists.end()) times = it->second;
        return discontinuous_vasicek(args.get("alpha", 0.01), args.get("beta", -0.5),
                                     args.get("sigma", 0.2), args.get("gamma", 0.1), times,
                                     horizon);
    }
    if (name == "cir")
        return cir_type(args.get("kappa", 0.8), args.get("sigma", 0.3), args.get("a0", 0.2),
                        horizon);
    if (name == "ar1") {
        std::vector<double> sched;
        auto it = args.lists.find("a");
        if (it != args.lists.end()) {
            sched = it->second;
        } else {
            sched.assign(static_cast<std::size_t>(args.get("steps", 8)), args.get("a", 0.8));
        }
        const double sd = args.get("noise-sd", 0.5);
        auto logcf = [sd](const cplx& u) { return 0.5 * sd * sd * u * u; };
        auto sampler = [sd](Rng& rng) { return rng.normal(0.0, sd); };
        return ar1_embed(sched, logcf, sampler);
    }
    throw InvalidParameter("unknown catalog model: " + name);
}

}  // namespace ajk
