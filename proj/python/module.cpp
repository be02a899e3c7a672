// pybind11 bindings: the main operations (solve, verify, oracle comparison,
// dual certificates, inequality sweeps) with JSON-string outputs that the
// Python package parses into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "menuforge/dual.hpp"
#include "menuforge/mechanism.hpp"
#include "menuforge/oracle.hpp"
#include "menuforge/solver.hpp"
#include "menuforge/verifier.hpp"

namespace py = pybind11;
using nlohmann::json;
using namespace menuforge;

namespace {

std::string solve_json(double c, double b1, double b2) {
  Mechanism mech = make_mechanism(solve(c, b1, b2));
  return to_json(mech, revenue(mech));
}

std::string solve_rect_json(double c1, double c2, double b1, double b2) {
  Mechanism mech = make_mechanism(solve_general_rect(SupportRect(c1, c2, b1, b2)));
  return to_json(mech, revenue(mech));
}

std::string verify_json(double c, double b1, double b2, double tol) {
  Mechanism mech = make_mechanism(solve(c, b1, b2));
  MyersonReport rep = verify_myerson(mech, tol);
  json j = json::parse(report_to_json(rep));
  const double balance = verify_exclusion_balance(mech);
  j["exclusion_balance"] = balance;
  j["pass"] = rep.pass && std::abs(balance) <= tol;
  return j.dump();
}

std::string dual_json(int example) {
  TransportPlan plan = build_example(example);
  DualityReport dual = strong_duality(plan);
  MarginalReport marg = check_marginals(plan);
  SlacknessReport slack = check_complementary_slackness(plan.mech, plan);
  bool dominance = true;
  json groups = json::array();
  for (const auto& g : plan.dominance_groups) {
    std::vector<SegmentMeasure> ms;
    std::string name;
    for (int i : g) {
      ms.push_back(plan.shuffles[i]);
      name += (name.empty() ? "" : "+") + plan.shuffles[i].name;
    }
    auto rep = check_convex_dominance(combine_measures(name, ms));
    dominance = dominance && rep.pass;
    groups.push_back({{"group", name},
                      {"mass", rep.total_mass},
                      {"first_moment", rep.first_moment},
                      {"min_hinge", rep.min_hinge},
                      {"pass", rep.pass}});
  }
  json j;
  j["schema_version"] = 1;
  j["example"] = example;
  j["primal"] = dual.primal;
  j["dual"] = dual.dual;
  j["gap"] = dual.gap;
  j["kernel_violation"] = slack.max_kernel_violation;
  j["pairing_gap"] = slack.pairing_gap;
  j["marginal_fiber_residual"] = marg.worst_fiber_residual;
  j["dominance"] = groups;
  j["pass"] = dual.pass && marg.pass && slack.pass && dominance;
  return j.dump();
}

std::string certify_json(const std::string& check_id, int grid_n, int workers,
                         double tol) {
  return sweep_to_json(certify_sweep(check_id, grid_n, workers, tol));
}

std::string oracle_json(double c, double b1, double b2, double allocation_grid,
                        double price_grid) {
  Mechanism mech = make_mechanism(solve(c, b1, b2));
  OracleConfig cfg;
  cfg.allocation_grid = allocation_grid;
  cfg.price_grid = price_grid;
  OracleResult res = oracle_search(mech.rect, cfg);
  json j;
  j["schema_version"] = 1;
  j["solver_revenue"] = revenue(mech);
  j["oracle_revenue"] = res.revenue;
  j["epsilon"] = oracle_epsilon(mech.rect, cfg);
  j["gap"] = revenue(mech) - res.revenue;
  j["partial"] = res.partial;
  return j.dump();
}

double revenue_of(double c, double b1, double b2) {
  return revenue(make_mechanism(solve(c, b1, b2)));
}

}  // namespace

PYBIND11_MODULE(_menuforge, m) {
  m.doc() = "Optimal unit-demand menus on uniform rectangles (C++ core)";
  m.def("solve_json", &solve_json, py::arg("c"), py::arg("b1"), py::arg("b2"),
        "Solve the symmetric support [c,c+b1]x[c,c+b2]; returns mechanism JSON.");
  m.def("solve_rect_json", &solve_rect_json, py::arg("c1"), py::arg("c2"),
        py::arg("b1"), py::arg("b2"),
        "Solve an asymmetric support (rectangle-exclusion regime only).");
  m.def("verify_json", &verify_json, py::arg("c"), py::arg("b1"), py::arg("b2"),
        py::arg("tol") = 1e-7, "Optimality-condition certificate report.");
  m.def("dual_json", &dual_json, py::arg("example"),
        "Dual transport certificate for worked example 1, 2, or 3.");
  m.def("certify_json", &certify_json, py::arg("check_id"), py::arg("grid") = 50,
        py::arg("workers") = 0, py::arg("tol") = 1e-9,
        "Numeric sweep of one closed-form inequality claim.");
  m.def("certify_check_ids",
        [] { return certify_check_ids(); },
        "All inequality-sweep check ids.");
  m.def("oracle_json", &oracle_json, py::arg("c"), py::arg("b1"), py::arg("b2"),
        py::arg("allocation_grid") = 0.05, py::arg("price_grid") = 0.02,
        "Brute-force menu search compared against the analytic solution.");
  m.def("revenue", &revenue_of, py::arg("c"), py::arg("b1"), py::arg("b2"),
        "Optimal expected revenue.");
}
