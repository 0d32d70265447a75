#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "divmin/general.hpp"
#include "divmin/io.hpp"
#include "divmin/primal.hpp"
#include "divmin/seqinf.hpp"

namespace py = pybind11;
using namespace divmin;

namespace {

ConstraintSet make_constraint(const py::dict& spec) {
  if (spec.contains("singleton"))
    return ConstraintSet(SingletonSet{spec["singleton"].cast<Vector>()});
  if (spec.contains("box")) {
    py::dict b = spec["box"].cast<py::dict>();
    return ConstraintSet(BoxSet{b["lo"].cast<Vector>(), b["hi"].cast<Vector>()});
  }
  if (spec.contains("polytope"))
    return ConstraintSet(
        PolytopeSet{spec["polytope"].cast<std::vector<Vector>>()});
  throw DomainError("constraint dict needs 'singleton', 'box' or 'polytope'");
}

}  // namespace

PYBIND11_MODULE(_divmin, m) {
  m.doc() = "Constrained minimum-divergence computations on [0,1]^K";

  py::register_exception<DomainError>(m, "DomainError");

  py::class_<FiniteDistribution>(m, "FiniteDistribution")
      .def(py::init<std::vector<Vector>, Vector>(), py::arg("atoms"),
           py::arg("weights"))
      .def_property_readonly("atoms", &FiniteDistribution::atoms)
      .def_property_readonly("weights", &FiniteDistribution::weights)
      .def_property_readonly("dim", &FiniteDistribution::dim)
      .def("mean", &FiniteDistribution::mean)
      .def("__len__", &FiniteDistribution::size)
      .def("__eq__", &FiniteDistribution::operator==);

  m.def("kl_divergence", &kl_divergence, py::arg("p"), py::arg("q"));
  m.def(
      "f_divergence",
      [](const FiniteDistribution& p, const FiniteDistribution& q,
         const std::string& name) {
        return f_divergence(p, q, FDivergenceSpec::from_name(name));
      },
      py::arg("p"), py::arg("q"), py::arg("divergence"));

  py::class_<KlinfResult>(m, "KlinfResult")
      .def_readonly("value", &KlinfResult::value)
      .def_property_readonly(
          "lam", [](const KlinfResult& r) { return r.argmax.lambda; })
      .def_property_readonly("gap",
                             [](const KlinfResult& r) { return r.argmax.gap; })
      .def_readonly("iterations", &KlinfResult::iterations)
      .def_readonly("converged", &KlinfResult::converged);

  m.def(
      "klinf",
      [](const FiniteDistribution& p, const Vector& mu, double tol) {
        return klinf(p, mu, tol);
      },
      py::arg("p"), py::arg("mu"), py::arg("tol") = 1e-7);
  m.def("hellinger_inf", &hellinger_inf, py::arg("p"), py::arg("mu"),
        py::arg("tol") = 1e-7);
  m.def("chisq_inf", &chisq_inf, py::arg("p"), py::arg("mu"),
        py::arg("tol") = 1e-7);
  m.def("support_gap", &support_gap, py::arg("lam"), py::arg("mu"));
  m.def("dual_objective", &dual_objective, py::arg("p"), py::arg("mu"),
        py::arg("lam"));

  py::class_<FDualResult>(m, "FDualResult")
      .def_readonly("value", &FDualResult::value)
      .def_property_readonly(
          "lam", [](const FDualResult& r) { return r.argmax.lambda; })
      .def_property_readonly(
          "gamma", [](const FDualResult& r) { return r.argmax.gamma; })
      .def_readonly("iterations", &FDualResult::iterations)
      .def_readonly("converged", &FDualResult::converged);

  m.def(
      "dinf",
      [](const FiniteDistribution& p, const Vector& mu,
         const std::string& name, double tol) {
        return dinf(p, mu, FDivergenceSpec::from_name(name), tol);
      },
      py::arg("p"), py::arg("mu"), py::arg("divergence"),
      py::arg("tol") = 1e-7);

  py::class_<PrimalResult>(m, "PrimalResult")
      .def_readonly("value", &PrimalResult::value)
      .def_readonly("minimizer", &PrimalResult::minimizer)
      .def_readonly("constraint_residual", &PrimalResult::constraint_residual);

  m.def("primal_klinf_finite", &primal_klinf_finite, py::arg("p"),
        py::arg("mu"), py::arg("tol") = 1e-9);
  m.def(
      "primal_fdiv_finite",
      [](const FiniteDistribution& p, const Vector& mu,
         const std::string& name, double tol) {
        return primal_fdiv_finite(p, mu, FDivergenceSpec::from_name(name),
                                  tol);
      },
      py::arg("p"), py::arg("mu"), py::arg("divergence"),
      py::arg("tol") = 1e-9);

  py::class_<DyadicGrid>(m, "DyadicGrid")
      .def(py::init<int, int>(), py::arg("level"), py::arg("dim"))
      .def_readonly("level", &DyadicGrid::level)
      .def_readonly("dim", &DyadicGrid::dim)
      .def("mesh", &DyadicGrid::mesh)
      .def_static("max_level", &DyadicGrid::max_level, py::arg("dim"));
  m.def("pushforward", &pushforward, py::arg("p"), py::arg("grid"));

  py::class_<ConvergenceTable>(m, "ConvergenceTable")
      .def_property_readonly("rows",
                             [](const ConvergenceTable& t) {
                               std::vector<std::pair<int, double>> rows;
                               for (const auto& r : t.rows)
                                 rows.emplace_back(r.level, r.value);
                               return rows;
                             })
      .def_readonly("undiscretized_value",
                    &ConvergenceTable::undiscretized_value);
  m.def("convergence_probe", &convergence_probe, py::arg("p"), py::arg("mu"),
        py::arg("k_min"), py::arg("k_max"));

  py::class_<GeneralDualResult>(m, "GeneralDualResult")
      .def_readonly("value", &GeneralDualResult::value)
      .def_property_readonly(
          "lam", [](const GeneralDualResult& r) { return r.argmax.lambda; })
      .def_property_readonly(
          "gamma", [](const GeneralDualResult& r) { return r.argmax.gamma; })
      .def_readonly("converged", &GeneralDualResult::converged)
      .def_readonly("unbounded_suspected",
                    &GeneralDualResult::unbounded_suspected)
      .def_readonly("truncation_radius", &GeneralDualResult::truncation_radius);

  m.def(
      "klinf_general",
      [](const FiniteDistribution& p, const std::string& g_name,
         const py::dict& constraint, double tol) {
        ConstraintFunction g = ConstraintFunction::builtin(g_name, p.dim());
        GeneralOptions opts;
        opts.tol = tol;
        return klinf_general(p, g, make_constraint(constraint), opts);
      },
      py::arg("p"), py::arg("g"), py::arg("constraint"),
      py::arg("tol") = 1e-7);

  m.def(
      "test_threshold",
      [](int n, int dim, double alpha, const std::string& variant) {
        return test_threshold(n, dim, alpha,
                              variant == "test_plus_one"
                                  ? ThresholdVariant::TestPlusOne
                                  : ThresholdVariant::Inversion);
      },
      py::arg("n"), py::arg("dim"), py::arg("alpha"),
      py::arg("variant") = "inversion");

  py::class_<TestStepResult>(m, "TestStepResult")
      .def_readonly("n", &TestStepResult::n)
      .def_readonly("statistic", &TestStepResult::statistic)
      .def_readonly("threshold", &TestStepResult::threshold)
      .def_readonly("fired", &TestStepResult::fired);

  py::class_<SequentialTest>(m, "SequentialTest")
      .def(py::init([](const Vector& mu0, double alpha,
                       const std::string& variant) {
             return SequentialTest({mu0, alpha,
                                    variant == "test_plus_one"
                                        ? ThresholdVariant::TestPlusOne
                                        : ThresholdVariant::Inversion});
           }),
           py::arg("mu0"), py::arg("alpha"),
           py::arg("variant") = "inversion")
      .def("step", &SequentialTest::step, py::arg("x"))
      .def_property_readonly("fired_at", &SequentialTest::fired_at);

  py::class_<StreamState>(m, "StreamState")
      .def(py::init<int>(), py::arg("dim"))
      .def("push", &StreamState::push, py::arg("x"))
      .def_property_readonly("n", &StreamState::n)
      .def("empirical", &StreamState::empirical);

  m.def("cs_membership", &cs_membership, py::arg("state"), py::arg("mu"),
        py::arg("alpha"));
  m.def(
      "cs_interval_1d",
      [](StreamState& s, double alpha, double grid_tol) {
        Interval iv = cs_interval_1d(s, alpha, grid_tol);
        return std::make_pair(iv.lo, iv.hi);
      },
      py::arg("state"), py::arg("alpha"), py::arg("grid_tol") = 1e-4);

  py::class_<DetectorStepResult>(m, "DetectorStepResult")
      .def_readonly("n", &DetectorStepResult::n)
      .def_readonly("log_e_detector", &DetectorStepResult::log_e_detector)
      .def_readonly("fired", &DetectorStepResult::fired)
      .def_readonly("fired_suffix", &DetectorStepResult::fired_suffix);

  py::class_<ChangeDetector>(m, "ChangeDetector")
      .def(py::init<Vector, double, int>(), py::arg("mu0"), py::arg("alpha"),
           py::arg("window") = 500)
      .def("step", &ChangeDetector::step, py::arg("x"))
      .def_property_readonly("fired_at", &ChangeDetector::fired_at);

  m.def("load_distribution", &load_distribution, py::arg("path"));
  m.def("parse_distribution", &parse_distribution, py::arg("json_text"));
  m.def("distribution_to_json",
        [](const FiniteDistribution& p) { return distribution_to_json(p); },
        py::arg("p"));
}
