#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "linfty/bottleneck.hpp"
#include "linfty/experiment.hpp"
#include "linfty/mapping.hpp"
#include "linfty/monotonicity.hpp"
#include "linfty/pnorm.hpp"

namespace py = pybind11;
using namespace linfty;

namespace {

// Python-side handle; measures are shared immutably with couplings.
struct Measure {
  MeasurePtr ptr;
};

Measure measure_from(const std::vector<std::vector<double>>& points,
                     std::optional<std::vector<double>> weights, bool normalize) {
  std::vector<Point> pts;
  for (const auto& p : points) pts.emplace_back(p);
  if (!weights) weights = std::vector<double>(pts.size(), 1.0 / static_cast<double>(pts.size()));
  return {share(make_measure(std::move(pts), std::move(*weights), normalize))};
}

std::vector<std::tuple<std::size_t, std::size_t, double>> entries_of(const Coupling& plan) {
  std::vector<std::tuple<std::size_t, std::size_t, double>> out;
  for (const auto& e : plan.entries()) out.emplace_back(e.i, e.j, e.mass);
  return out;
}

PSolveOptions options_for(bool reversed) {
  return {reversed ? ArcOrder::kReversed : ArcOrder::kForward, true};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bottleneck optimal transport solvers and IM/ICM certificates";

  py::class_<Measure>(m, "Measure")
      .def(py::init(&measure_from), py::arg("points"), py::arg("weights") = py::none(),
           py::arg("normalize") = true)
      .def_property_readonly("size", [](const Measure& mu) { return mu.ptr->size(); })
      .def_property_readonly("dim", [](const Measure& mu) { return mu.ptr->dim(); })
      .def_property_readonly("weights", [](const Measure& mu) {
        return std::vector<double>(mu.ptr->weights().begin(), mu.ptr->weights().end());
      })
      .def_property_readonly("points", [](const Measure& mu) {
        std::vector<std::vector<double>> out;
        for (const auto& p : mu.ptr->points()) {
          out.emplace_back(p.coords().begin(), p.coords().end());
        }
        return out;
      })
      .def("__len__", [](const Measure& mu) { return mu.ptr->size(); });

  m.def(
      "grid_measure",
      [](const std::vector<double>& lower, const std::vector<double>& upper, std::size_t n) {
        return Measure{share(grid_measure(Point(lower), Point(upper), n))};
      },
      py::arg("lower"), py::arg("upper"), py::arg("n"),
      "Uniform measure on the n^d cell centers of a box.");

  py::class_<CostFunction>(m, "Cost")
      .def_static("euclidean", &CostFunction::euclidean, py::arg("dim"))
      .def_static("sup_norm", &CostFunction::sup_norm, py::arg("dim"))
      .def_static(
          "power",
          [](std::size_t dim, double q) {
            return CostFunction::translation_invariant(dim, power_norm(q));
          },
          py::arg("dim"), py::arg("exponent"), "c(x, y) = |y - x|^exponent")
      .def_static(
          "from_spec",
          [](const std::string& spec, std::size_t dim) {
            return experiment::make_cost(experiment::parse_cost_spec(spec), dim);
          },
          py::arg("spec"), py::arg("dim"))
      .def("squared", &CostFunction::squared)
      .def_property_readonly("name", &CostFunction::name)
      .def_property_readonly("dim", &CostFunction::dim)
      .def("__call__", [](const CostFunction& c, const std::vector<double>& x,
                          const std::vector<double>& y) {
        return evaluate_cost(c, Point(x), Point(y));
      });

  py::class_<Coupling>(m, "Coupling")
      .def(py::init([](const Measure& mu, const Measure& nu,
                       const std::vector<std::tuple<std::size_t, std::size_t, double>>& entries) {
             std::vector<CouplingEntry> es;
             for (const auto& [i, j, mass] : entries) es.push_back({i, j, mass});
             return Coupling(mu.ptr, nu.ptr, std::move(es));
           }),
           py::arg("mu"), py::arg("nu"), py::arg("entries"))
      .def_property_readonly("entries", &entries_of)
      .def_property_readonly("support_size", &Coupling::support_size)
      .def("is_valid", [](const Coupling& plan, double tol) {
        return validate_coupling(plan, tol).pass;
      }, py::arg("tol") = kMarginalTolerance);

  py::class_<MonotonicityCertificate>(m, "Certificate")
      .def_property_readonly("kind", [](const MonotonicityCertificate& c) {
        return to_string(c.kind);
      })
      .def_readonly("passed", &MonotonicityCertificate::pass)
      .def_readonly("witness", &MonotonicityCertificate::witness)
      .def_readonly("own_max", &MonotonicityCertificate::own_max)
      .def_readonly("permuted_max", &MonotonicityCertificate::permuted_max)
      .def_readonly("tolerance", &MonotonicityCertificate::tolerance);

  m.def(
      "solve_bottleneck",
      [](const Measure& mu, const Measure& nu, const CostFunction& c) {
        auto sol = solve_bottleneck(mu.ptr, nu.ptr, c);
        return py::make_tuple(sol.value, sol.plan);
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"), "Returns (value, plan).");
  m.def(
      "brute_force_bottleneck",
      [](const Measure& mu, const Measure& nu, const CostFunction& c) {
        return brute_force_bottleneck(*mu.ptr, *nu.ptr, c);
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"));
  m.def(
      "solve_p",
      [](const Measure& mu, const Measure& nu, const CostFunction& c, double p, bool reversed) {
        auto sol = solve_p(mu.ptr, nu.ptr, c, p, options_for(reversed));
        return py::make_tuple(sol.value, sol.plan);
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"), py::arg("p"), py::arg("reversed") = false,
      "Returns (C_p value, plan).");
  m.def(
      "run_p_schedule",
      [](const Measure& mu, const Measure& nu, const CostFunction& c,
         std::optional<std::vector<double>> ps, bool reversed) {
        const double lambda = solve_bottleneck(mu.ptr, nu.ptr, c).value;
        auto schedule = run_p_schedule(mu.ptr, nu.ptr, c, ps.value_or(default_p_schedule()),
                                       lambda, options_for(reversed));
        std::vector<double> values;
        for (const auto& s : schedule.solutions) values.push_back(s.value);
        return py::make_tuple(values, lambda, schedule.terminal_plan);
      },
      py::arg("mu"), py::arg("nu"), py::arg("cost"), py::arg("p_list") = py::none(),
      py::arg("reversed") = false, "Returns (values, bottleneck value, terminal plan).");

  m.def("check_im", &check_IM, py::arg("plan"), py::arg("cost"),
        py::arg("tol") = kExactPlanTolerance);
  m.def("check_icm", &check_ICM_cycles, py::arg("plan"), py::arg("cost"),
        py::arg("tol") = kExactPlanTolerance);
  m.def("brute_force_icm", &brute_force_ICM, py::arg("plan"), py::arg("cost"),
        py::arg("max_subset"), py::arg("tol") = kExactPlanTolerance);

  m.def(
      "extract_map",
      [](const Coupling& plan, double tol) {
        auto map = extract_map(plan, tol);
        return py::make_tuple(map.assignment, map.nondeterministic_mass);
      },
      py::arg("plan"), py::arg("dominance_tol") = 1e-9,
      "Returns (assignment, nondeterministic mass).");
  m.def(
      "uniqueness_gap",
      [](const Assignment& t, const Assignment& t_tilde, std::size_t atom, const Measure& mu,
         const Measure& nu) {
        auto r = uniqueness_gap(t, t_tilde, atom, *mu.ptr, *nu.ptr);
        return py::make_tuple(r.gap, r.symmetric_gap);
      },
      py::arg("t"), py::arg("t_tilde"), py::arg("atom_index"), py::arg("mu"), py::arg("nu"));

  m.def(
      "run_config",
      [](const std::filesystem::path& path, std::optional<std::filesystem::path> out,
         std::optional<std::uint64_t> seed) {
        auto config = experiment::parse_config(path);
        if (out) config.output_dir = *out;
        if (seed) config.seed = *seed;
        return experiment::run_experiment(config).exit_code;
      },
      py::arg("path"), py::arg("out") = py::none(), py::arg("seed") = py::none(),
      "Runs an experiment config; returns 0, or 2 when a built-in check failed.");

  py::register_exception<experiment::ConfigError>(m, "ConfigError", PyExc_ValueError);
}
