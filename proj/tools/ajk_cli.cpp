// ajk: affine semimartingales with jumps at fixed times.
// Subcommands: solve, check, simulate, price, verify-drift,
// verify-martingale, compare-charfn. Exit codes: 0 success, 2 config error,
// 3 numerical failure, 4 verification failure.
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ajk/errors.hpp"
#include "ajk/json_io.hpp"
#include "ajk/models.hpp"
#include "ajk/riccati.hpp"
#include "ajk/simulate.hpp"
#include "ajk/termstructure.hpp"

namespace {

using namespace ajk;

struct ModelArgs {
    std::string name;
    std::string params_csv;
    std::string model_file;
    double lambda = -1.0, tau = -1.0, alpha_opt = std::nan(""), beta_opt = std::nan(""),
           sigma_opt = std::nan(""), kappa_opt = std::nan(""), a0_opt = std::nan(""),
           gamma_opt = std::nan("");
    std::string jump_times_csv;
};

std::vector<double> parse_list(std::string s, char sep) {
    if (sep == ';')  // list-valued flags accept either separator
        std::replace(s.begin(), s.end(), ',', ';');
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty()) out.push_back(std::stod(item));
    return out;
}

CatalogArgs catalog_args(const ModelArgs& a) {
    CatalogArgs args;
    std::stringstream ss(a.params_csv);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("--params entries must be key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (val.find(';') != std::string::npos)
            args.lists[key] = parse_list(val, ';');
        else
            args.scalars[key] = std::stod(val);
    }
    if (a.lambda > 0) args.scalars["lambda"] = a.lambda;
    if (a.tau > 0) args.scalars["tau"] = a.tau;
    if (!std::isnan(a.alpha_opt)) args.scalars["alpha"] = a.alpha_opt;
    if (!std::isnan(a.beta_opt)) args.scalars["beta"] = a.beta_opt;
    if (!std::isnan(a.sigma_opt)) args.scalars["sigma"] = a.sigma_opt;
    if (!std::isnan(a.kappa_opt)) args.scalars["kappa"] = a.kappa_opt;
    if (!std::isnan(a.a0_opt)) args.scalars["a0"] = a.a0_opt;
    if (!std::isnan(a.gamma_opt)) args.scalars["gamma"] = a.gamma_opt;
    if (!a.jump_times_csv.empty()) args.lists["jump-times"] = parse_list(a.jump_times_csv, ';');
    return args;
}

ModelSpec resolve_model(const ModelArgs& a, double horizon_hint) {
    if (!a.model_file.empty() && !a.name.empty())
        throw InvalidParameter("give either --model or --model-file, not both");
    if (!a.model_file.empty()) {
        std::ifstream in(a.model_file);
        if (!in) throw InvalidParameter("cannot open model file: " + a.model_file);
        json j = json::parse(in);
        return ModelSpec{"file:" + a.model_file, params_from_json(j), std::nullopt, nullptr,
                         false};
    }
    if (a.name.empty()) throw InvalidParameter("a model is required (--model or --model-file)");
    CatalogArgs args = catalog_args(a);
    if (!args.has("horizon") && horizon_hint > 0) args.scalars["horizon"] = horizon_hint;
    return make_catalog_model(a.name, args);
}

void add_model_options(CLI::App* cmd, ModelArgs& a) {
    cmd->add_option("--model", a.name, "catalog model name");
    cmd->add_option("--params", a.params_csv, "model parameters k=v,k=v;v;v");
    cmd->add_option("--model-file", a.model_file, "JSON model file");
    cmd->add_option("--lambda", a.lambda, "jump intensity");
    cmd->add_option("--tau", a.tau, "fixed jump time");
    cmd->add_option("--alpha", a.alpha_opt, "drift level");
    cmd->add_option("--beta", a.beta_opt, "mean reversion");
    cmd->add_option("--sigma", a.sigma_opt, "volatility");
    cmd->add_option("--kappa", a.kappa_opt, "CIR mean reversion");
    cmd->add_option("--a0", a.a0_opt, "CIR drift floor");
    cmd->add_option("--gamma", a.gamma_opt, "atom shock standard deviation");
    cmd->add_option("--jump-times", a.jump_times_csv, "semicolon-separated atom times");
}

struct TsArgs {
    std::string family = "vasicek";
    double alpha = 0.05, beta = -0.8, sigma = 0.03, gamma = 0.05, r0 = 0.03;
    std::string jump_times_csv = "1.0";
    double horizon = 10.0;
    double a1_scale = 1.0;
};

void add_ts_options(CLI::App* cmd, TsArgs& a) {
    cmd->add_option("--ts", a.family, "loading family: vasicek|gaussian|discontinuous");
    cmd->add_option("--alpha", a.alpha, "short-rate drift level");
    cmd->add_option("--beta", a.beta, "short-rate mean reversion (nonzero)");
    cmd->add_option("--sigma", a.sigma, "short-rate volatility");
    cmd->add_option("--gamma", a.gamma, "atom shock standard deviation");
    cmd->add_option("--jump-times", a.jump_times_csv, "semicolon-separated atom times");
    cmd->add_option("--r0", a.r0, "initial short rate");
    cmd->add_option("--horizon", a.horizon, "driver horizon");
    cmd->add_option("--a1-scale", a.a1_scale, "scale on the first loading (1 = arbitrage-free)");
}

TermStructureModel resolve_ts(const TsArgs& a) {
    if (a.family == "vasicek")
        return vasicek_term_structure(a.alpha, a.beta, a.sigma, a.r0, a.horizon, a.a1_scale);
    if (a.family == "gaussian")
        return gaussian_term_structure(a.alpha, a.beta, a.sigma, a.r0, a.horizon, a.a1_scale);
    if (a.family == "discontinuous")
        return discontinuous_term_structure(a.alpha, a.beta, a.sigma, a.gamma,
                                            parse_list(a.jump_times_csv, ';'), a.r0, a.horizon,
                                            a.a1_scale);
    throw InvalidParameter("unknown loading family: " + a.family);
}

int threads_from_env(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("AJK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << content;
}

cvec parse_u(const std::string& u_str, std::size_t d) {
    std::vector<std::string> parts;
    std::stringstream ss(u_str);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    if (parts.size() != d)
        throw InvalidParameter("u needs " + std::to_string(d) + " comma-separated components");
    cvec u(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = parse_complex(parts[k]);
    return u;
}

rvec parse_x0(const std::string& s, std::size_t d) {
    if (s.empty()) return rvec(d, 0.0);
    rvec x = parse_list(s, ',');
    if (x.size() != d)
        throw InvalidParameter("x0 needs " + std::to_string(d) + " components");
    return x;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"affine semimartingales with jumps at fixed times"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "solve the measure Riccati equations backward");
    ModelArgs solve_model;
    add_model_options(solve, solve_model);
    double solve_T = 1.0;
    std::string solve_u = "0+1i";
    std::string solve_out = "ajk_solve";
    double solve_abs = 0.0, solve_rel = 0.0;
    solve->add_option("--T", solve_T, "terminal time")->required();
    solve->add_option("--u", solve_u, "terminal value, components 'a+bi' comma-separated");
    solve->add_option("--out", solve_out, "output prefix (CSV + jump-log JSON)");
    solve->add_option("--abs-tol", solve_abs, "solver absolute tolerance");
    solve->add_option("--rel-tol", solve_rel, "solver relative tolerance");

    // check
    auto* check = app.add_subcommand("check", "admissibility and conservativeness report");
    ModelArgs check_model;
    add_model_options(check, check_model);
    double check_T = 0.0;
    std::string check_out;
    check->add_option("--T", check_T, "conservativeness horizon (default: driver horizon)");
    check->add_option("--out", check_out, "write the JSON report here (default stdout)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo paths to columnar CSV");
    ModelArgs sim_model;
    add_model_options(sim, sim_model);
    double sim_T = 1.0;
    std::size_t sim_paths = 1000;
    std::uint64_t sim_seed = 1;
    std::string sim_x0, sim_out = "ajk_paths.csv";
    std::size_t sim_grid = 64;
    int sim_threads = 0;
    sim->add_option("--T", sim_T, "horizon")->required();
    sim->add_option("--paths", sim_paths, "number of paths");
    sim->add_option("--seed", sim_seed, "RNG seed");
    sim->add_option("--x0", sim_x0, "initial state, comma-separated");
    sim->add_option("--grid", sim_grid, "uniform grid points");
    sim->add_option("--out", sim_out, "output CSV path");
    sim->add_option("--threads", sim_threads, "worker cap (or AJK_THREADS)");

    // price
    auto* price = app.add_subcommand("price", "bond prices in the extended HJM families");
    TsArgs price_ts;
    add_ts_options(price, price_ts);
    double price_T = 5.0, price_t = std::nan(""), price_r = std::nan(""), price_R = 0.0;
    int price_n = 21;
    std::string price_out = "ajk_prices.csv";
    price->add_option("--T", price_T, "maturity (grid upper end)")->required();
    price->add_option("--t", price_t, "single valuation time (else a curve from 0)");
    price->add_option("--r", price_r, "short-rate state (default r0)");
    price->add_option("--R", price_R, "integrated-rate state");
    price->add_option("--n", price_n, "curve grid size");
    price->add_option("--out", price_out, "output CSV path");

    // verify-drift
    auto* vdrift = app.add_subcommand("verify-drift", "drift-condition residuals");
    TsArgs vd_ts;
    add_ts_options(vdrift, vd_ts);
    int vd_pairs = 100;
    std::uint64_t vd_seed = 1;
    std::string vd_out;
    vdrift->add_option("--pairs", vd_pairs, "random (t,T) pairs");
    vdrift->add_option("--seed", vd_seed, "sampling seed");
    vdrift->add_option("--out", vd_out, "write the JSON report here (default stdout)");

    // verify-martingale
    auto* vmart = app.add_subcommand("verify-martingale", "discounted-bond martingale test");
    TsArgs vm_ts;
    add_ts_options(vmart, vm_ts);
    double vm_T = 4.0;
    std::size_t vm_paths = 20000;
    std::uint64_t vm_seed = 1;
    int vm_threads = 0;
    std::string vm_out;
    vmart->add_option("--T", vm_T, "bond maturity");
    vmart->add_option("--paths", vm_paths, "number of paths");
    vmart->add_option("--seed", vm_seed, "RNG seed");
    vmart->add_option("--threads", vm_threads, "worker cap (or AJK_THREADS)");
    vmart->add_option("--out", vm_out, "write the JSON report here (default stdout)");

    // compare-charfn
    auto* ccf = app.add_subcommand("compare-charfn", "solver vs Monte Carlo z-scores");
    ModelArgs ccf_model;
    add_model_options(ccf, ccf_model);
    double ccf_T = 1.0, ccf_umax = 2.0;
    int ccf_ucount = 10;
    std::size_t ccf_paths = 100000;
    std::uint64_t ccf_seed = 1;
    std::string ccf_x0, ccf_out;
    int ccf_threads = 0;
    ccf->add_option("--T", ccf_T, "horizon")->required();
    ccf->add_option("--u-max", ccf_umax, "largest |Im u| on the grid");
    ccf->add_option("--u-count", ccf_ucount, "grid size");
    ccf->add_option("--paths", ccf_paths, "number of paths");
    ccf->add_option("--seed", ccf_seed, "RNG seed");
    ccf->add_option("--x0", ccf_x0, "initial state, comma-separated");
    ccf->add_option("--threads", ccf_threads, "worker cap (or AJK_THREADS)");
    ccf->add_option("--out", ccf_out, "write the JSON report here (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) {
            ModelSpec model = resolve_model(solve_model, solve_T);
            const cvec u = parse_u(solve_u, model.shape().d());
            RiccatiOptions ropt;
            if (solve->count("--abs-tol")) {
                if (!(solve_abs > 0.0)) throw InvalidParameter("tolerances must be positive");
                ropt.abs_tol = solve_abs;
            }
            if (solve->count("--rel-tol")) {
                if (!(solve_rel > 0.0)) throw InvalidParameter("tolerances must be positive");
                ropt.rel_tol = solve_rel;
            }
            const auto sol = solve_backward(model.params, solve_T, u, ropt);
            std::ostringstream csv;
            solution_to_csv(sol, csv);
            write_file(solve_out + "_solution.csv", csv.str());
            write_file(solve_out + "_jumps.json", jump_log_to_json(sol).dump(2) + "\n");
            std::cout << "phi_0 = " << sol.phi(0.0).real() << (sol.phi(0.0).imag() < 0 ? "" : "+")
                      << sol.phi(0.0).imag() << "i  (wrote " << solve_out << "_solution.csv)\n";
            return 0;
        }
        if (check->parsed()) {
            ModelSpec model = resolve_model(check_model, 0.0);
            const double T = check_T > 0 ? check_T : model.driver().horizon();
            json rep;
            rep["model"] = model.name;
            rep["admissibility"] = admissibility_to_json(check_admissible(model.params));
            rep["conservativeness"] =
                conservativeness_to_json(conservativeness_check(model.params, T));
            const std::string text = rep.dump(2) + "\n";
            if (check_out.empty())
                std::cout << text;
            else
                write_file(check_out, text);
            return 0;
        }
        if (sim->parsed()) {
            ModelSpec model = resolve_model(sim_model, sim_T);
            SimulateOptions opt;
            opt.grid_points = sim_grid;
            opt.threads = threads_from_env(sim_threads);
            const auto e = simulate(model, parse_x0(sim_x0, model.shape().d()), sim_T, sim_paths,
                                    sim_seed, opt);
            std::ostringstream os;
            e.to_csv(os);
            write_file(sim_out, os.str());
            std::cout << "wrote " << sim_out << " (" << e.n_paths << " paths, "
                      << e.grid.size() << " grid times)\n";
            return 0;
        }
        if (price->parsed()) {
            price_ts.horizon = std::max(price_ts.horizon, price_T);
            const auto m = resolve_ts(price_ts);
            const double r = std::isnan(price_r) ? m.r0 : price_r;
            std::ostringstream os;
            os << "t,T,price\n";
            char buf[64];
            auto row = [&](double t, double T) {
                const double p = m.bond_price(t, T, r, price_R);
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", t, T, p);
                os << buf;
            };
            if (!std::isnan(price_t)) {
                row(price_t, price_T);
            } else {
                for (int k = 0; k < price_n; ++k)
                    row(0.0, price_T * k / std::max(1, price_n - 1));
            }
            write_file(price_out, os.str());
            std::cout << "wrote " << price_out << "\n";
            return 0;
        }
        if (vdrift->parsed()) {
            const auto m = resolve_ts(vd_ts);
            const auto rep = verify_drift_condition(m, vd_pairs, vd_seed);
            const std::string text = drift_report_to_json(rep).dump(2) + "\n";
            if (vd_out.empty())
                std::cout << text;
            else
                write_file(vd_out, text);
            return rep.pass ? 0 : 4;
        }
        if (vmart->parsed()) {
            vm_ts.horizon = std::max(vm_ts.horizon, vm_T);
            const auto m = resolve_ts(vm_ts);
            MartingaleTestOptions opt;
            opt.threads = threads_from_env(vm_threads);
            const auto rep = martingale_test(m, vm_T, vm_paths, vm_seed, opt);
            const std::string text = bond_martingale_to_json(rep).dump(2) + "\n";
            if (vm_out.empty())
                std::cout << text;
            else
                write_file(vm_out, text);
            return rep.pass ? 0 : 4;
        }
        if (ccf->parsed()) {
            ModelSpec model = resolve_model(ccf_model, ccf_T);
            const std::size_t d = model.shape().d();
            std::vector<cvec> grid;
            for (int k = 1; k <= ccf_ucount; ++k) {
                cvec u(d, cplx{0.0, 0.0});
                for (std::size_t c = 0; c < d; ++c)
                    u[c] = cplx{0.0, ccf_umax * k / ccf_ucount};
                grid.push_back(u);
            }
            SimulateOptions opt;
            opt.threads = threads_from_env(ccf_threads);
            const auto rep = compare_charfn(model, parse_x0(ccf_x0, d), ccf_T, grid, ccf_paths,
                                            ccf_seed, opt);
            const std::string text = charfn_comparison_to_json(rep).dump(2) + "\n";
            if (ccf_out.empty())
                std::cout << text;
            else
                write_file(ccf_out, text);
            return rep.pass ? 0 : 4;
        }
    } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const OutOfDomain& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
