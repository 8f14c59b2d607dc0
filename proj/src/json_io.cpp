#include "ajk/json_io.hpp"

#include <cmath>
#include <ostream>

#include "ajk/errors.hpp"

namespace ajk {

namespace {

Polynomial poly_from_json(const json& j) {
    const std::string kind = j.value("kind", "poly");
    std::vector<double> coeffs = j.at("coeffs").get<std::vector<double>>();
    if (kind == "const" && coeffs.size() != 1)
        throw InvalidParameter("density kind 'const' takes exactly one coefficient");
    return Polynomial(std::move(coeffs));
}

json poly_to_json(const Polynomial& p) {
    json j;
    j["kind"] = p.coeffs.size() == 1 ? "const" : "poly";
    j["coeffs"] = p.coeffs;
    return j;
}

// number | {"pieces":[{"t0","t1","coeffs"}]}
PiecewisePoly scalar_fn_from_json(const json& j, double horizon) {
    if (j.is_number()) return PiecewisePoly::constant(j.get<double>(), 0.0, horizon);
    PiecewisePoly out;
    for (const auto& piece : j.at("pieces"))
        out.pieces.push_back({piece.at("t0").get<double>(), piece.at("t1").get<double>(),
                              Polynomial(piece.at("coeffs").get<std::vector<double>>())});
    return out;
}

JumpComponent component_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "point") {
        return PointMass{j.at("x").get<rvec>(), j.value("weight", 1.0)};
    }
    if (kind == "gaussian") {
        GaussianAxis g;
        g.axis = j.at("axis").get<std::size_t>() - 1;  // 1-based in files
        g.mean = j.value("mean", 0.0);
        g.stddev = j.at("stddev").get<double>();
        if (j.contains("offset")) g.offset = j.at("offset").get<rvec>();
        g.weight = j.value("weight", 1.0);
        g.restrict_to_D = j.value("restrict", false);
        return g;
    }
    if (kind == "exponential") {
        ExponentialAxis e;
        e.axis = j.at("axis").get<std::size_t>() - 1;
        e.rate = j.at("rate").get<double>();
        e.weight = j.value("weight", 1.0);
        return e;
    }
    throw InvalidParameter("unknown jump component kind: " + kind);
}

JumpMeasureSpec jump_from_json(const json& j, std::size_t d) {
    std::vector<JumpComponent> comps;
    for (const auto& c : j) comps.push_back(component_from_json(c));
    return JumpMeasureSpec(d, std::move(comps));
}

// Registered black-box transforms addressable from model files.
TableGamma named_table_gamma(const std::string& name, const json& args, std::size_t d) {
    TableGamma g;
    if (name == "logcosh_usq") {
        // +/-1 coin plus sqrt-state-scaled normal shock
        g.map = [](const cvec& u) {
            return std::make_pair(std::log(std::cosh(u[0])), cvec{0.5 * u[0] * u[0]});
        };
        return g;
    }
    if (name == "bernoulli_increment") {
        const double p = args.at("p").get<double>();
        g.map = [p, d](const cvec& u) {
            const cplx g0 = u[0] + std::log(p + std::exp(-u[0]) * (1.0 - p));
            return std::make_pair(g0, cvec(d, cplx{0.0, 0.0}));
        };
        return g;
    }
    if (name == "ar1_gaussian") {
        const double a = args.at("a").get<double>();
        const double sd = args.at("sd").get<double>();
        g.map = [a, sd](const cvec& u) {
            return std::make_pair(0.5 * sd * sd * u[0] * u[0], cvec{(a - 1.0) * u[0]});
        };
        return g;
    }
    throw InvalidParameter("unknown table gamma transform: " + name);
}

rmat mat_from_json(const json& j, std::size_t d) {
    rmat m(d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) m(r, c) = j.at(r).at(c).get<double>();
    return m;
}

}  // namespace

json driver_to_json(const DriverMeasure& A) {
    json j;
    j["segments"] = json::array();
    for (const auto& seg : A.segments())
        j["segments"].push_back({{"t0", seg.t0}, {"t1", seg.t1}, {"density", poly_to_json(seg.poly)}});
    j["atoms"] = json::array();
    for (const auto& atom : A.atoms()) j["atoms"].push_back({{"t", atom.t}, {"dA", atom.dA}});
    return j;
}

DriverMeasure driver_from_json(const json& j) {
    std::vector<PiecewisePoly::Piece> segs;
    for (const auto& seg : j.at("segments"))
        segs.push_back({seg.at("t0").get<double>(), seg.at("t1").get<double>(),
                        poly_from_json(seg.at("density"))});
    std::vector<Atom> atoms;
    if (j.contains("atoms"))
        for (const auto& atom : j.at("atoms"))
            atoms.push_back({atom.at("t").get<double>(), atom.at("dA").get<double>()});
    return DriverMeasure(std::move(segs), std::move(atoms));
}

AffineParameterSet params_from_json(const json& j) {
    StateSpaceShape shape{j.at("shape").at("m").get<std::size_t>(),
                          j.at("shape").at("n").get<std::size_t>()};
    const std::size_t d = shape.d();
    DriverMeasure driver = driver_from_json(j.at("driver"));
    const double horizon = driver.horizon();

    std::vector<TimeVec> betas;
    for (const auto& entry : j.at("beta")) {
        std::vector<PiecewisePoly> comps;
        for (const auto& c : entry) comps.push_back(scalar_fn_from_json(c, horizon));
        betas.push_back([comps](double t) {
            rvec v(comps.size());
            for (std::size_t k = 0; k < comps.size(); ++k) v[k] = comps[k](t);
            return v;
        });
    }

    std::vector<TimeMat> alphas;
    for (const auto& entry : j.at("alpha")) {
        // matrices of scalars or piecewise polynomials
        std::vector<std::vector<PiecewisePoly>> rows;
        for (const auto& r : entry) {
            std::vector<PiecewisePoly> row;
            for (const auto& c : r) row.push_back(scalar_fn_from_json(c, horizon));
            rows.push_back(std::move(row));
        }
        alphas.push_back([rows, d](double t) {
            rmat m(d);
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t c = 0; c < d; ++c) m(r, c) = rows[r][c](t);
            return m;
        });
    }

    std::vector<TimeJump> mus;
    for (const auto& entry : j.at("mu")) {
        JumpMeasureSpec spec = jump_from_json(entry, d);
        mus.push_back(const_jump(std::move(spec)));
    }

    std::map<double, GammaForm> gamma;
    if (j.contains("gamma")) {
        for (const auto& entry : j.at("gamma")) {
            const double t = entry.at("t").get<double>();
            const std::string kind = entry.at("kind").get<std::string>();
            if (kind == "enhanced") {
                const auto& data = entry.at("data");
                EnhancedGamma eg;
                for (const auto& b : data.at("beta")) eg.beta.push_back(b.get<rvec>());
                for (const auto& a : data.at("alpha")) eg.alpha.push_back(mat_from_json(a, d));
                for (const auto& mu : data.at("mu")) eg.mu.push_back(jump_from_json(mu, d));
                gamma.emplace(t, std::move(eg));
            } else if (kind == "table") {
                const auto& data = entry.at("data");
                gamma.emplace(t, named_table_gamma(data.at("name").get<std::string>(),
                                                   data.value("params", json::object()), d));
            } else {
                throw InvalidParameter("unknown gamma kind: " + kind);
            }
        }
    }
    return AffineParameterSet(shape, std::move(driver), std::move(betas), std::move(alphas),
                              std::move(mus), std::move(gamma));
}

json complex_to_json(const cplx& z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

cplx complex_from_json(const json& j) {
    return cplx{j.at("re").get<double>(), j.at("im").get<double>()};
}

namespace {

// std::stod that rejects trailing junk.
double strict_stod(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InvalidParameter("trailing characters in number: " + s);
    return v;
}

}  // namespace

cplx parse_complex(const std::string& s) {
    if (s.empty()) throw InvalidParameter("empty complex literal");
    const auto ipos = s.find_last_of("iI");
    try {
        if (ipos == std::string::npos) return cplx{strict_stod(s), 0.0};
        if (ipos != s.size() - 1)
            throw InvalidParameter("complex literal must end in 'i': " + s);
        std::string body = s.substr(0, s.size() - 1);
        // split the imaginary part off at the last +/- that is not an exponent sign
        std::size_t split = std::string::npos;
        for (std::size_t k = body.size(); k-- > 1;) {
            if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
                split = k;
                break;
            }
        }
        if (split == std::string::npos) {
            const double im =
                body.empty() || body == "+" ? 1.0 : (body == "-" ? -1.0 : strict_stod(body));
            return cplx{0.0, im};
        }
        const double re = strict_stod(body.substr(0, split));
        std::string ims = body.substr(split);
        double im;
        if (ims == "+") im = 1.0;
        else if (ims == "-") im = -1.0;
        else im = strict_stod(ims);
        return cplx{re, im};
    } catch (const InvalidParameter&) {
        throw InvalidParameter("cannot parse complex literal: " + s);
    } catch (const std::exception&) {
        throw InvalidParameter("cannot parse complex literal: " + s);
    }
}

json admissibility_to_json(const AdmissibilityReport& rep) {
    json items = json::array();
    for (const auto& it : rep.items) {
        json e;
        e["condition"] = it.condition;
        e["status"] = it.status == CheckStatus::Pass
                          ? "pass"
                          : (it.status == CheckStatus::Fail ? "fail" : "unverified");
        if (it.status != CheckStatus::Pass) {
            e["detail"] = it.detail;
            e["time"] = it.time;
            e["index"] = it.index;
        }
        items.push_back(e);
    }
    return json{{"admissible", rep.admissible()},
                {"fully_verified", rep.fully_verified()},
                {"conditions", items}};
}

json conservativeness_to_json(const ConservativenessReport& rep) {
    return json{{"verdict", rep.verdict_string()},
                {"detail", rep.detail},
                {"zero_residual", rep.zero_residual},
                {"probe_expansion", rep.probe_expansion}};
}

json jump_log_to_json(const RiccatiSolution& sol) {
    json j = json::array();
    for (const auto& rec : sol.jump_log()) {
        json e;
        e["t"] = rec.t;
        e["d_phi"] = complex_to_json(rec.d_phi);
        e["d_psi"] = json::array();
        for (const auto& z : rec.d_psi) e["d_psi"].push_back(complex_to_json(z));
        j.push_back(e);
    }
    return j;
}

json charfn_comparison_to_json(const CharFnComparison& rep) {
    json entries = json::array();
    for (const auto& e : rep.entries) {
        json u = json::array();
        for (const auto& z : e.u) u.push_back(complex_to_json(z));
        entries.push_back({{"u", u},
                           {"solver", complex_to_json(e.solver_value)},
                           {"mc", complex_to_json(e.mc_estimate)},
                           {"std_error", e.std_error},
                           {"z", e.z}});
    }
    return json{{"pass", rep.pass}, {"max_z", rep.max_z}, {"entries", entries}};
}

json drift_report_to_json(const DriftConditionReport& rep) {
    return json{{"pass", rep.pass},
                {"max_residual", rep.max_residual},
                {"worst_t", rep.worst_t},
                {"worst_T", rep.worst_T}};
}

json bond_martingale_to_json(const BondMartingaleReport& rep) {
    return json{{"pass", rep.pass},
                {"drift_precondition_ok", rep.drift_precondition_ok},
                {"max_drift_residual", rep.max_drift_residual},
                {"max_z", rep.max_z},
                {"times", rep.times},
                {"z", rep.z}};
}

void solution_to_csv(const RiccatiSolution& sol, std::ostream& os) {
    const std::size_t d = sol.u().size();
    os << "t,re_phi,im_phi";
    for (std::size_t k = 1; k <= d; ++k) os << ",re_psi_" << k << ",im_psi_" << k;
    os << "\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    const auto& phi_nodes = sol.phi_trajectory().nodes();
    const auto& psi_nodes = sol.psi_trajectory().nodes();
    for (std::size_t i = 0; i < phi_nodes.size(); ++i) {
        put(phi_nodes[i].t);
        os << ",";
        put(phi_nodes[i].value[0].real());
        os << ",";
        put(phi_nodes[i].value[0].imag());
        for (std::size_t k = 0; k < d; ++k) {
            os << ",";
            put(psi_nodes[i].value[k].real());
            os << ",";
            put(psi_nodes[i].value[k].imag());
        }
        os << "\n";
    }
}

}  // namespace ajk
