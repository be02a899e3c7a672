// Command-line front end: solve / verify / sweep / oracle / dual / certify.
//
// Exit codes: 0 success, 1 domain or usage error, 2 verification failure
// (verify / certify / dual verbs). All JSON output carries
// "schema_version": 1. Numeric inputs may be given in absolute units
// (--c, --b1, --b2) or as ratios to b2 (--c-over-b2, --b1-over-b2); ratios
// normalize to b2 = 1, which is lossless by scaling covariance.

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "menuforge/dual.hpp"
#include "menuforge/mechanism.hpp"
#include "menuforge/oracle.hpp"
#include "menuforge/solver.hpp"
#include "menuforge/verifier.hpp"

using nlohmann::json;
using namespace menuforge;

namespace {

struct Range {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

// Parses "lo:hi:step" (also accepts a single number as a one-point range).
Range parse_range(const std::string& s) {
  Range r;
  const auto p1 = s.find(':');
  if (p1 == std::string::npos) {
    r.lo = r.hi = std::stod(s);
    r.step = 1.0;
    return r;
  }
  const auto p2 = s.find(':', p1 + 1);
  if (p2 == std::string::npos) throw std::domain_error("range must be lo:hi:step: " + s);
  r.lo = std::stod(s.substr(0, p1));
  r.hi = std::stod(s.substr(p1 + 1, p2 - p1 - 1));
  r.step = std::stod(s.substr(p2 + 1));
  if (r.step <= 0.0 || r.hi < r.lo) throw std::domain_error("bad range: " + s);
  return r;
}

std::vector<double> range_points(const Range& r) {
  std::vector<double> pts;
  const int n = static_cast<int>(std::floor((r.hi - r.lo) / r.step + 1e-9));
  for (int i = 0; i <= n; ++i) pts.push_back(r.lo + i * r.step);
  return pts;
}

int resolve_workers(int flag_value) {
  if (const char* env = std::getenv("MENUFORGE_WORKERS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      throw std::domain_error("MENUFORGE_WORKERS must be an integer");
    }
  }
  if (flag_value > 0) return flag_value;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

struct GeometryFlags {
  double c = 0.0, c1 = -1.0, c2 = -1.0, b1 = 1.0, b2 = 1.0;
  double c_over_b2 = -1.0, b1_over_b2 = -1.0;
  bool has_c = false, has_c1 = false, has_c2 = false;
  bool has_c_ratio = false, has_b1_ratio = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--c", c, "corner value (both items)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--c1", c1, "item-1 corner (asymmetric support)");
    cmd->add_option("--c2", c2, "item-2 corner (asymmetric support)");
    cmd->add_option("--b1", b1, "item-1 side length")->check(CLI::PositiveNumber);
    cmd->add_option("--b2", b2, "item-2 side length")->check(CLI::PositiveNumber);
    cmd->add_option("--c-over-b2", c_over_b2, "corner as a ratio to b2");
    cmd->add_option("--b1-over-b2", b1_over_b2, "b1 as a ratio to b2");
    cmd->callback([cmd, this] {
      has_c = cmd->count("--c") > 0;
      has_c1 = cmd->count("--c1") > 0;
      has_c2 = cmd->count("--c2") > 0;
      has_c_ratio = cmd->count("--c-over-b2") > 0;
      has_b1_ratio = cmd->count("--b1-over-b2") > 0;
    });
  }

  // Resolves flags into a solved mechanism.
  SolveResult solve_from_flags() const {
    if (has_c1 != has_c2)
      throw std::domain_error("--c1 and --c2 must be given together");
    if (has_c1 && (has_c || has_c_ratio))
      throw std::domain_error("--c conflicts with --c1/--c2");
    if (has_c && has_c_ratio)
      throw std::domain_error("--c conflicts with --c-over-b2");
    double bb1 = b1, bb2 = b2;
    if (has_b1_ratio) {
      bb2 = 1.0;
      bb1 = b1_over_b2;
    }
    if (has_c1) {
      SupportRect rect{c1, c2, bb1, bb2};
      return solve_general_rect(rect);
    }
    const double cc = has_c_ratio ? c_over_b2 * bb2 : c;
    return solve(cc, bb1, bb2);
  }
};

void emit(const std::string& text) { std::cout << text << "\n"; }

json mech_summary(const Mechanism& mech) {
  json j;
  j["schema_version"] = 1;
  j["regime"] = to_string(mech.regime.label);
  j["rect"] = {{"c1", mech.rect.c1}, {"c2", mech.rect.c2},
               {"b1", mech.rect.b1}, {"b2", mech.rect.b2}};
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) j["params"][k] = *v;
  };
  put("delta1", mech.params.delta1);
  put("delta2", mech.params.delta2);
  put("delta_star", mech.params.delta_star);
  put("h", mech.params.h);
  put("a1", mech.params.a1);
  put("a2", mech.params.a2);
  put("a", mech.params.a);
  j["revenue"] = revenue(mech);
  return j;
}

int run_solve(const GeometryFlags& g, const std::string& output) {
  Mechanism mech = make_mechanism(g.solve_from_flags());
  if (output == "json") {
    emit(to_json(mech, revenue(mech)));
  } else {
    std::ostringstream os;
    os.precision(10);
    os << "regime " << to_string(mech.regime.label) << "  revenue "
       << revenue(mech) << "\n"
       << mech_summary(mech)["params"].dump();
    emit(os.str());
  }
  return 0;
}

int run_verify(const GeometryFlags& g, const std::string& output, double tol) {
  Mechanism mech = make_mechanism(g.solve_from_flags());
  MyersonReport rep = verify_myerson(mech, tol);
  const double balance = verify_exclusion_balance(mech);
  const double rev_gap = std::abs(revenue(mech) - revenue_via_measure(mech));
  const bool pass = rep.pass && std::abs(balance) <= tol && rev_gap <= tol;
  if (output == "json") {
    json j = json::parse(report_to_json(rep));
    j["exclusion_balance"] = balance;
    j["revenue_gap"] = rev_gap;
    j["pass"] = pass;
    emit(j.dump(2));
  } else {
    std::ostringstream os;
    os.precision(10);
    os << (pass ? "PASS" : "FAIL") << "  worst_margin " << rep.worst_margin
       << " (" << rep.worst_check << ")  exclusion_balance " << balance;
    emit(os.str());
  }
  return pass ? 0 : 2;
}

int run_sweep(const std::string& b1_spec, const std::string& c_spec,
              const std::string& output, int workers) {
  const auto b1s = range_points(parse_range(b1_spec));
  const auto cs = range_points(parse_range(c_spec));
  struct Row {
    double c, b1;
    Mechanism mech;
  };
  std::vector<Row> rows(b1s.size() * cs.size());
  const int nw = std::min<int>(resolve_workers(workers), static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&] {
      for (size_t i; (i = next.fetch_add(1)) < rows.size();) {
        const double b1 = b1s[i / cs.size()];
        const double c = cs[i % cs.size()];
        rows[i] = {c, b1, make_mechanism(solve(c, b1, 1.0))};
      }
    });
  }
  for (auto& t : pool) t.join();

  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream os;
    os.precision(10);
    os << *v;
    return os.str();
  };
  if (output == "json") {
    json j;
    j["schema_version"] = 1;
    for (const auto& r : rows) {
      json e = mech_summary(r.mech);
      e.erase("schema_version");
      e["c_over_b2"] = r.c;
      e["b1_over_b2"] = r.b1;
      j["cells"].push_back(e);
    }
    emit(j.dump());
  } else {
    std::ostringstream os;
    os.precision(10);
    os << "c_over_b2,b1_over_b2,regime,delta1,delta2,delta_star,h,a1,a2,a,revenue\n";
    for (const auto& r : rows) {
      const auto& p = r.mech.params;
      os << r.c << ',' << r.b1 << ',' << to_string(r.mech.regime.label) << ','
         << opt(p.delta1) << ',' << opt(p.delta2) << ',' << opt(p.delta_star)
         << ',' << opt(p.h) << ',' << opt(p.a1) << ',' << opt(p.a2) << ','
         << opt(p.a) << ',' << revenue(r.mech) << '\n';
    }
    std::cout << os.str();
  }
  return 0;
}

int run_oracle(const GeometryFlags& g, const std::string& output, double grid,
               int workers) {
  Mechanism mech = make_mechanism(g.solve_from_flags());
  OracleConfig cfg;
  if (grid > 0.0) {
    cfg.price_grid = grid;
    cfg.allocation_grid = grid;
  }
  cfg.workers = resolve_workers(workers);
  OracleResult res = oracle_search(mech.rect, cfg, 3);
  const double eps = oracle_epsilon(mech.rect, cfg);
  const double gap = revenue(mech) - res.revenue;
  json j;
  j["schema_version"] = 1;
  j["solver_revenue"] = revenue(mech);
  j["oracle_revenue"] = res.revenue;
  j["gap"] = gap;
  j["epsilon"] = eps;
  j["partial"] = res.partial;
  j["within_epsilon"] = gap >= -eps;
  if (output == "csv") {
    std::cout << oracle_top_csv(res);
  } else if (output == "json") {
    emit(j.dump(2));
  } else {
    std::ostringstream os;
    os.precision(10);
    os << "solver " << revenue(mech) << "  oracle " << res.revenue << "  gap "
       << gap << "  epsilon " << eps;
    emit(os.str());
  }
  return 0;
}

int run_dual(int example, const std::string& output) {
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
  const bool pass = dual.pass && marg.pass && slack.pass && dominance;
  json j;
  j["schema_version"] = 1;
  j["example"] = example;
  j["primal"] = dual.primal;
  j["dual"] = dual.dual;
  j["gap"] = dual.gap;
  j["marginal_fiber_residual"] = marg.worst_fiber_residual;
  j["marginal_segment_residual"] = marg.worst_segment_residual;
  j["kernel_violation"] = slack.max_kernel_violation;
  j["pairing_gap"] = slack.pairing_gap;
  j["dominance"] = groups;
  j["pass"] = pass;
  if (output == "csv") {
    std::cout << density_csv(plan);
  } else if (output == "json") {
    emit(j.dump(2));
  } else {
    std::ostringstream os;
    os.precision(10);
    os << (pass ? "PASS" : "FAIL") << "  primal " << dual.primal << "  dual "
       << dual.dual << "  gap " << dual.gap;
    emit(os.str());
  }
  return pass ? 0 : 2;
}

int run_certify(const std::string& check, int grid_n, double tol, int workers,
                const std::string& output) {
  std::vector<std::string> ids;
  if (check.empty() || check == "all") {
    ids = certify_check_ids();
  } else {
    ids.push_back(check);
  }
  const int nw = resolve_workers(workers);
  bool pass = true;
  json all = json::array();
  std::ostringstream csv;
  for (const auto& id : ids) {
    SweepReport rep = certify_sweep(id, grid_n, nw, tol);
    pass = pass && rep.pass;
    if (output == "csv") {
      csv << sweep_to_csv(rep);
    } else {
      all.push_back(json::parse(sweep_to_json(rep)));
    }
    if (output == "text") {
      std::ostringstream os;
      os.precision(10);
      os << (rep.pass ? "PASS" : "FAIL") << "  " << id << "  worst_margin "
         << rep.worst_margin;
      emit(os.str());
    }
  }
  if (output == "csv") {
    std::cout << csv.str();
  } else if (output == "json") {
    json j;
    j["schema_version"] = 1;
    j["checks"] = all;
    j["pass"] = pass;
    emit(j.dump(2));
  }
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"menuforge: optimal unit-demand menus on uniform rectangles"};
  app.require_subcommand(1);

  std::string output = "text";
  GeometryFlags g_solve, g_verify, g_oracle;
  double tolerance = 1e-7;
  double grid = 0.0;
  int grid_n = 50;
  int workers = 0;
  int example = 1;
  std::string b1_spec = "1:2.2:0.02", c_spec = "0:12:0.1";
  std::string check;

  auto* solve_cmd = app.add_subcommand("solve", "solve for the optimal menu");
  g_solve.add(solve_cmd);
  solve_cmd->add_option("--output", output, "json|text");

  auto* verify_cmd = app.add_subcommand("verify", "certify a solved mechanism");
  g_verify.add(verify_cmd);
  verify_cmd->add_option("--output", output, "json|text");
  verify_cmd->add_option("--tolerance", tolerance, "margin tolerance");

  auto* sweep_cmd = app.add_subcommand("sweep", "regime sweep over (c/b2, b1/b2)");
  sweep_cmd->add_option("--b1-over-b2", b1_spec, "lo:hi:step");
  sweep_cmd->add_option("--c-over-b2", c_spec, "lo:hi:step");
  sweep_cmd->add_option("--output", output, "csv|json");
  sweep_cmd->add_option("--workers", workers, "worker threads (0 = auto)");

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force revenue search");
  g_oracle.add(oracle_cmd);
  oracle_cmd->add_option("--output", output, "json|csv|text");
  oracle_cmd->add_option("--grid", grid, "price and allocation grid step");
  oracle_cmd->add_option("--workers", workers, "worker threads (0 = auto)");

  auto* dual_cmd = app.add_subcommand("dual", "dual certificate for a worked example");
  dual_cmd->add_option("--example", example, "worked example number (1-3)")
      ->check(CLI::Range(1, 3));
  dual_cmd->add_option("--output", output, "json|csv|text");

  auto* certify_cmd = app.add_subcommand("certify", "numeric inequality sweeps");
  certify_cmd->add_option("--check", check, "check id (default: all)");
  certify_cmd->add_option("--grid", grid_n, "grid points per axis")
      ->check(CLI::Range(2, 10000));
  certify_cmd->add_option("--tolerance", tolerance, "margin tolerance");
  certify_cmd->add_option("--workers", workers, "worker threads (0 = auto)");
  certify_cmd->add_option("--output", output, "json|csv|text");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      if (output == "text" && solve_cmd->count("--output") == 0) output = "json";
      return run_solve(g_solve, output);
    }
    if (verify_cmd->parsed()) return run_verify(g_verify, output, tolerance);
    if (sweep_cmd->parsed()) {
      if (sweep_cmd->count("--output") == 0) output = "csv";
      return run_sweep(b1_spec, c_spec, output, workers);
    }
    if (oracle_cmd->parsed()) {
      if (oracle_cmd->count("--output") == 0) output = "json";
      return run_oracle(g_oracle, output, grid, workers);
    }
    if (dual_cmd->parsed()) {
      if (dual_cmd->count("--output") == 0) output = "json";
      return run_dual(example, output);
    }
    if (certify_cmd->parsed()) {
      if (certify_cmd->count("--output") == 0) output = "text";
      return run_certify(check, grid_n, tolerance, workers, output);
    }
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
