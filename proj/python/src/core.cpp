#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cohesive/acceptance.hpp"
#include "cohesive/catalog.hpp"
#include "cohesive/config.hpp"
#include "cohesive/expr.hpp"
#include "cohesive/forward.hpp"
#include "cohesive/oracle.hpp"
#include "cohesive/reconstruct.hpp"

namespace py = pybind11;
using namespace cohesive;

namespace {

Json to_json_arg(const py::object& spec) {
  if (py::isinstance<py::str>(spec)) return source_from_argument(spec.cast<std::string>());
  py::object dumps = py::module_::import("json").attr("dumps");
  return Json::parse(dumps(spec).cast<std::string>());
}

py::array_t<double> as_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict sampled(const SampledFunction& f) {
  py::dict d;
  d["x"] = as_array(f.grid());
  d["y"] = as_array(f.values());
  return d;
}

std::vector<double> vec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return std::vector<double>(a.data(), a.data() + a.size());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cohesive laws of phase-field damage models";

  static py::exception<Error> error(m, "CohesiveError");
  static py::exception<HypothesisViolation> hyp(m, "HypothesisViolation", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const HypothesisViolation& e) {
      PyErr_SetString(hyp.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  m.def("catalog_names", &names);
  m.def(
      "catalog_entry",
      [](const std::string& name, const py::dict& params) {
        CatalogEntry e = get(name, params_from_json(to_json_arg(params)));
        py::dict d;
        d["name"] = e.name;
        d["description"] = e.description;
        d["regime"] = to_string(e.target.regime);
        d["sigma"] = e.target.sigma;
        d["g_inf"] = e.target.g_inf;
        d["s_frac0"] = e.target.s_frac0;
        std::vector<std::string> labels;
        for (const auto& am : e.analytic_models) labels.push_back(am.label);
        d["models"] = labels;
        d["g0"] = py::cpp_function(e.target.g0);
        d["g0_prime"] = py::cpp_function(e.target.g0_prime);
        return d;
      },
      py::arg("name"), py::arg("params") = py::dict());

  py::class_<PhaseFieldModel>(m, "Model")
      .def_readonly("name", &PhaseFieldModel::name)
      .def_readonly("sigma", &PhaseFieldModel::sigma)
      .def_property_readonly("two_psi1", &PhaseFieldModel::two_psi1)
      .def("khat", [](const PhaseFieldModel& M, double t) { return M.khat(t); })
      .def("omega", [](const PhaseFieldModel& M, double x) { return M.omega(x); })
      .def("fhat", [](const PhaseFieldModel& M, double t) { return M.fhat(t); })
      .def("hypotheses", [](const PhaseFieldModel& M) { return M.report.summary(); });

  m.def(
      "load_model", [](const py::object& spec, bool check) { return load_model(to_json_arg(spec), check); },
      py::arg("spec"), py::arg("check") = true,
      "Model from 'catalog:NAME', a JSON file path or a dict in the JSON schema.");

  m.def("capital_phi", &capital_phi, py::arg("model"), py::arg("m"));

  py::class_<ForwardSolver>(m, "ForwardSolver")
      .def(py::init<PhaseFieldModel, int, int>(), py::arg("model"), py::arg("n_nodes") = 512, py::arg("threads") = 1,
           py::call_guard<py::gil_scoped_release>())
      .def("g", &ForwardSolver::g_value, py::arg("s"), py::call_guard<py::gil_scoped_release>())
      .def("g_prime", &ForwardSolver::g_derivative, py::arg("s"), py::call_guard<py::gil_scoped_release>())
      .def("m_star", &ForwardSolver::m_star, py::arg("s"))
      .def_property_readonly("s_frac", &ForwardSolver::s_frac)
      .def_property_readonly("phi_table", [](const ForwardSolver& f) { return sampled(f.phi().table); })
      .def(
          "curve",
          [](const ForwardSolver& f, const py::array_t<double, py::array::c_style | py::array::forcecast>& s,
             int threads) {
            auto grid = vec(s);
            CohesiveCurve c;
            {
              py::gil_scoped_release nogil;
              c = f.cohesive_curve(grid, threads);
            }
            py::dict d;
            d["s"] = as_array(c.s_grid);
            d["g"] = as_array(c.g_values);
            d["g_prime"] = as_array(c.g_prime_values);
            d["m_star"] = as_array(c.m_star_values);
            d["s_frac"] = c.s_frac;
            d["two_psi1"] = c.two_psi1;
            return d;
          },
          py::arg("s"), py::arg("threads") = 1);

  m.def(
      "reconstruct",
      [](const py::object& target_spec, const std::string& fix, int n_nodes, int threads) {
        TargetCohesiveLaw target = load_target(to_json_arg(target_spec));
        auto eq = fix.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::BadParameters, "fix must be khat=<expr> or omega=<expr>");
        std::string kind = fix.substr(0, eq);
        ScalarFn fixed = Expression::parse(fix.substr(eq + 1)).fn();
        ReconstructOptions opt;
        opt.n_nodes = n_nodes;
        opt.threads = threads;
        ReconstructionResult r;
        {
          py::gil_scoped_release nogil;
          if (kind == "khat") r = omega_from_khat(target, fixed, std::nullopt, opt);
          else if (kind == "omega") r = khat_from_omega(target, fixed, opt);
          else throw Error(ErrorKind::BadParameters, "fix must start with khat= or omega=");
        }
        py::dict d;
        d["produced_name"] = r.produced_name;
        d["produced"] = sampled(r.produced);
        d["regime"] = to_string(r.regime);
        d["abel_roundtrip_err"] = r.diagnostics.abel_roundtrip_err;
        d["model"] = r.model;
        return d;
      },
      py::arg("target"), py::arg("fix"), py::arg("n_nodes") = 512, py::arg("threads") = 1);

  m.def(
      "discrete_g",
      [](const PhaseFieldModel& model, double s, int n_w, int n_m, int threads) {
        OracleConfig cfg;
        cfg.n_w = n_w;
        cfg.n_m = n_m;
        cfg.threads = threads;
        py::gil_scoped_release nogil;
        auto r = discrete_g(model, s, cfg);
        return std::make_pair(r.g, r.argmin_m);
      },
      py::arg("model"), py::arg("s"), py::arg("n_w") = 2000, py::arg("n_m") = 200, py::arg("threads") = 1,
      "(g, argmin m) of the discretized reduced problem.");

  m.def(
      "h_sigma", [](double vs, double t) { return h_sigma(default_degradation(), vs, t); }, py::arg("varsigma"),
      py::arg("t"), "Diffuse density for phi_deg(x) = x/(1+x).");

  m.def(
      "run_criterion",
      [](int id, int threads) {
        CriterionResult r;
        {
          py::gil_scoped_release nogil;
          r = run_criterion(id, threads);
        }
        py::object loads = py::module_::import("json").attr("loads");
        return loads(to_json(r).dump());
      },
      py::arg("id"), py::arg("threads") = 1);
}
