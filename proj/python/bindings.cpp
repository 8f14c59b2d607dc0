#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ajk/admissibility.hpp"
#include "ajk/json_io.hpp"
#include "ajk/models.hpp"
#include "ajk/riccati.hpp"
#include "ajk/simulate.hpp"
#include "ajk/termstructure.hpp"

namespace py = pybind11;
using namespace ajk;

namespace {

CatalogArgs args_from_dict(const py::dict& d) {
    CatalogArgs args;
    for (auto item : d) {
        const std::string key = py::cast<std::string>(item.first);
        if (py::isinstance<py::list>(item.second) || py::isinstance<py::tuple>(item.second)) {
            args.lists[key] = py::cast<std::vector<double>>(item.second);
        } else {
            args.scalars[key] = py::cast<double>(item.second);
        }
    }
    return args;
}

py::array_t<double> ensemble_states(const PathEnsemble& e) {
    py::array_t<double> out({e.n_paths, e.grid.size(), e.dim});
    std::copy(e.states.begin(), e.states.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "affine semimartingales with jumps at fixed times";

    py::class_<ModelSpec>(m, "Model")
        .def_readonly("name", &ModelSpec::name)
        .def_property_readonly("m", [](const ModelSpec& s) { return s.shape().m; })
        .def_property_readonly("n", [](const ModelSpec& s) { return s.shape().n; })
        .def_property_readonly("horizon",
                               [](const ModelSpec& s) { return s.driver().horizon(); })
        .def_property_readonly("has_closed_form",
                               [](const ModelSpec& s) { return s.closed_form.has_value(); })
        .def("closed_form",
             [](const ModelSpec& s, double from_s, double to_t, const cvec& u) {
                 if (!s.closed_form) throw Error("model has no closed form");
                 return (*s.closed_form)(from_s, to_t, u);
             },
             py::arg("s"), py::arg("t"), py::arg("u"));

    m.def("make_model",
          [](const std::string& name, const py::dict& params) {
              return make_catalog_model(name, args_from_dict(params));
          },
          py::arg("name"), py::arg("params") = py::dict());
    m.def("catalog_names", &catalog_names);
    m.def("load_model_json", [](const std::string& text) {
        return ModelSpec{"file", params_from_json(json::parse(text)), std::nullopt, nullptr,
                         false};
    });

    py::class_<RiccatiSolution>(m, "Solution")
        .def_property_readonly("T", &RiccatiSolution::T)
        .def_property_readonly("u", &RiccatiSolution::u)
        .def_property_readonly("error_estimate", &RiccatiSolution::error_estimate)
        .def("phi", [](const RiccatiSolution& s, double t) { return s.phi(t); })
        .def("psi", [](const RiccatiSolution& s, double t) { return s.psi(t); })
        .def("phi_left", [](const RiccatiSolution& s, double t) { return s.phi_left(t); })
        .def("psi_left", [](const RiccatiSolution& s, double t) { return s.psi_left(t); })
        .def_property_readonly(
            "breakpoints",
            [](const RiccatiSolution& s) { return s.phi_trajectory().breakpoints(); })
        .def_property_readonly("jump_log", [](const RiccatiSolution& s) {
            return jump_log_to_json(s).dump();
        });

    m.def("solve",
          [](const ModelSpec& model, double T, const cvec& u) {
              return solve_backward(model.params, T, u);
          },
          py::arg("model"), py::arg("T"), py::arg("u"));
    m.def("char_fn",
          [](const RiccatiSolution& sol, double s, const rvec& x) { return char_fn(sol, s, x); },
          py::arg("solution"), py::arg("s"), py::arg("x"));
    m.def("semiflow_check",
          [](const ModelSpec& model, double T, const cvec& u, double r) {
              const auto res = semiflow_check(model.params, T, u, r);
              return py::make_tuple(res.phi, res.psi);
          },
          py::arg("model"), py::arg("T"), py::arg("u"), py::arg("r"));
    m.def("check_admissible", [](const ModelSpec& model) {
        return admissibility_to_json(check_admissible(model.params)).dump();
    });
    m.def("conservativeness_check", [](const ModelSpec& model, double T) {
        return conservativeness_to_json(conservativeness_check(model.params, T)).dump();
    });

    py::class_<PathEnsemble>(m, "Ensemble")
        .def_readonly("model_name", &PathEnsemble::model_name)
        .def_readonly("grid", &PathEnsemble::grid)
        .def_readonly("seed", &PathEnsemble::seed)
        .def_readonly("domain_exit_count", &PathEnsemble::domain_exit_count)
        .def_property_readonly("states", &ensemble_states);

    m.def("simulate",
          [](const ModelSpec& model, const rvec& x0, double T, std::size_t n_paths,
             std::uint64_t seed, std::size_t grid_points, int threads) {
              SimulateOptions opt;
              opt.grid_points = grid_points;
              opt.threads = threads;
              return simulate(model, x0, T, n_paths, seed, opt);
          },
          py::arg("model"), py::arg("x0"), py::arg("T"), py::arg("n_paths"), py::arg("seed"),
          py::arg("grid_points") = 64, py::arg("threads") = 1);
    m.def("compare_charfn",
          [](const ModelSpec& model, const rvec& x0, double T, const std::vector<cvec>& u_grid,
             std::size_t n_paths, std::uint64_t seed, int threads) {
              SimulateOptions opt;
              opt.threads = threads;
              return charfn_comparison_to_json(
                         compare_charfn(model, x0, T, u_grid, n_paths, seed, opt))
                  .dump();
          },
          py::arg("model"), py::arg("x0"), py::arg("T"), py::arg("u_grid"), py::arg("n_paths"),
          py::arg("seed"), py::arg("threads") = 1);

    py::class_<TermStructureModel>(m, "TermStructure")
        .def_readonly("r0", &TermStructureModel::r0)
        .def("A_field", &TermStructureModel::A_field, py::arg("t"), py::arg("T"))
        .def("f0", &TermStructureModel::f0_value, py::arg("v"))
        .def("short_rate", &TermStructureModel::short_rate, py::arg("t"), py::arg("r"),
             py::arg("R"))
        .def("bond_price", &TermStructureModel::bond_price, py::arg("t"), py::arg("T"),
             py::arg("r"), py::arg("R") = 0.0)
        .def_property_readonly("x_model", &TermStructureModel::x_model);

    m.def("make_term_structure",
          [](const std::string& family, double alpha, double beta, double sigma, double gamma,
             const std::vector<double>& jump_times, double r0, double horizon, double a1_scale) {
              if (family == "vasicek")
                  return vasicek_term_structure(alpha, beta, sigma, r0, horizon, a1_scale);
              if (family == "gaussian")
                  return gaussian_term_structure(alpha, beta, sigma, r0, horizon, a1_scale);
              if (family == "discontinuous")
                  return discontinuous_term_structure(alpha, beta, sigma, gamma, jump_times, r0,
                                                      horizon, a1_scale);
              throw InvalidParameter("unknown loading family: " + family);
          },
          py::arg("family"), py::arg("alpha") = 0.05, py::arg("beta") = -0.8,
          py::arg("sigma") = 0.03, py::arg("gamma") = 0.05,
          py::arg("jump_times") = std::vector<double>{}, py::arg("r0") = 0.03,
          py::arg("horizon") = 10.0, py::arg("a1_scale") = 1.0);
    m.def("drift_residual", &drift_residual, py::arg("model"), py::arg("t"), py::arg("T"));
    m.def("verify_drift_condition",
          [](const TermStructureModel& m_, int pairs, std::uint64_t seed) {
              return drift_report_to_json(verify_drift_condition(m_, pairs, seed)).dump();
          },
          py::arg("model"), py::arg("pairs") = 100, py::arg("seed") = 1);
    m.def("martingale_test",
          [](const TermStructureModel& m_, double T, std::size_t n_paths, std::uint64_t seed,
             int threads) {
              MartingaleTestOptions opt;
              opt.threads = threads;
              return bond_martingale_to_json(martingale_test(m_, T, n_paths, seed, opt)).dump();
          },
          py::arg("model"), py::arg("T"), py::arg("n_paths"), py::arg("seed"),
          py::arg("threads") = 1);

    // translators run newest-first: register the base before the derived
    // kinds so specific exceptions keep their python types
    py::register_exception<Error>(m, "AjkError");
    py::register_exception<OutOfDomain>(m, "OutOfDomainError");
    py::register_exception<DomainViolation>(m, "DomainViolationError");
    py::register_exception<InvalidParameter>(m, "InvalidParameterError");
}
