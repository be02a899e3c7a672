#include "menuforge/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "menuforge/measure.hpp"
#include "menuforge/solver.hpp"

namespace menuforge {

namespace {

// Canonical copy with b1 >= b2 and b2 = 1: mirror if needed, then rescale.
// Margins computed on the canonical copy are scale-free.
Mechanism canonicalize(const Mechanism& mech) {
  Mechanism m = mech;
  if (m.rect.b1 < m.rect.b2) {
    m.rect = SupportRect(m.rect.c2, m.rect.c1, m.rect.b2, m.rect.b1);
    for (MenuItem& it : m.menu.items) std::swap(it.q1, it.q2);
    for (Point& p : m.exclusion.v) std::swap(p.x, p.y);
    if (m.exclusion.v.size() >= 3)
      std::reverse(m.exclusion.v.begin() + 1, m.exclusion.v.end());
    m.partition.clear();  // not needed by the verifier
  }
  double s = m.rect.b2;
  m.rect = SupportRect(m.rect.c1 / s, m.rect.c2 / s, m.rect.b1 / s, m.rect.b2 / s);
  for (MenuItem& it : m.menu.items) it.price /= s;
  for (Point& p : m.exclusion.v) {
    p.x /= s;
    p.y /= s;
  }
  return m;
}

// Exclusion region recomputed from the menu itself (the null best-response
// cell). Falls back to the mechanism's stored region when the cell is
// degenerate (posted-price structures exclude only a boundary segment).
Polygon exclusion_from_menu(const Mechanism& mech) {
  Polygon cell = mech.rect.polygon();
  for (size_t j = 1; j < mech.menu.items.size() && !cell.v.empty(); ++j) {
    const MenuItem& it = mech.menu.items[j];
    cell = clip_halfplane(cell, it.q1, it.q2, it.price);  // u_j <= 0
  }
  if (cell.v.size() < 3 || polygon_area(cell) < 1e-12 * mech.rect.area())
    return mech.exclusion;
  return cell;
}

constexpr double kEps = 1e-9;

}  // namespace

MyersonReport verify_myerson(const Mechanism& mech_in, double tol) {
  Mechanism mech = canonicalize(mech_in);
  const double b1 = mech.rect.b1, b2 = mech.rect.b2;
  MyersonReport report;

  Polygon exclusion = exclusion_from_menu(mech);
  std::vector<double> bps = allocation_breakpoints(mech);
  PiecewiseV pv = fit_V(mech.rect, exclusion, bps);

  std::vector<double> ends;
  ends.push_back(-b2);
  for (double b : bps) ends.push_back(b);
  ends.push_back(b1);

  for (size_t i = 0; i + 1 < ends.size(); ++i) {
    IntervalReport ir;
    ir.lo = ends[i];
    ir.hi = ends[i + 1];
    ir.q1 = utility_profile(mech, 0.5 * (ir.lo + ir.hi)).q1;
    double total = integral_V(pv, ir.lo, ir.hi);
    double vlo = pv.eval(ir.lo), vhi = pv.eval(ir.hi);
    bool at_lo = std::abs(ir.lo + b2) < kEps;   // interval starts at -b2
    bool at_hi = std::abs(ir.hi - b1) < kEps;   // interval ends at b1
    auto add = [&ir](const std::string& name, double margin) {
      ir.margins.emplace_back(name, margin);
    };
    if (ir.q1 < kEps) {
      ir.condition_set = 2;
      add("2a-starts-at-lower-end", at_lo ? 0.0 : -std::abs(ir.lo + b2));
      add("2b-V-zero-at-right-end", at_hi ? 0.0 : -std::abs(vhi));
      add("2c-integral-nonpositive", -total);
      // 2d: the running prefix integral attains its minimum at the right end.
      add("2d-prefix-min-at-end", min_prefix_integral(pv, ir.lo, ir.hi) - total);
      double running = 0.0, prev = ir.lo, worst = 0.0;
      for (int k = 1; k <= 200; ++k) {
        double x = ir.lo + (ir.hi - ir.lo) * k / 200.0;
        running += integral_V(pv, prev, x);
        prev = x;
        worst = std::min(worst, running - total);
      }
      add("2d-sampled-200", worst);
    } else if (ir.q1 > 1.0 - kEps) {
      ir.condition_set = 4;
      add("4a-ends-at-upper-end", at_hi ? 0.0 : -std::abs(ir.hi - b1));
      add("4b-V-zero-at-left-end", at_lo ? 0.0 : -std::abs(vlo));
      add("4c-integral-nonnegative", total);
      // 4d: the running suffix integral attains its maximum at the left end.
      add("4d-suffix-max-at-start", total - max_suffix_integral(pv, ir.lo, ir.hi));
      double worst = 0.0;
      for (int k = 0; k < 200; ++k) {
        double x = ir.lo + (ir.hi - ir.lo) * k / 200.0;
        worst = std::min(worst, total - integral_V(pv, x, ir.hi));
      }
      add("4d-sampled-200", worst);
    } else {
      ir.condition_set = 3;
      add("3a-V-zero-at-left-end", at_lo ? 0.0 : -std::abs(vlo));
      add("3b-V-zero-at-right-end", at_hi ? 0.0 : -std::abs(vhi));
      add("3c-integral-zero", -std::abs(total));
      add("3d-prefix-nonnegative", min_prefix_integral(pv, ir.lo, ir.hi));
      double running = 0.0, prev = ir.lo, worst = 0.0;
      for (int k = 1; k <= 200; ++k) {
        double x = ir.lo + (ir.hi - ir.lo) * k / 200.0;
        running += integral_V(pv, prev, x);
        prev = x;
        worst = std::min(worst, running);
      }
      add("3d-sampled-200", worst);
    }
    ir.pass = true;
    for (const auto& [name, margin] : ir.margins) ir.pass = ir.pass && margin >= -tol;
    report.intervals.push_back(std::move(ir));
  }

  report.worst_margin = 0.0;
  report.pass = true;
  for (const IntervalReport& ir : report.intervals)
    for (const auto& [name, margin] : ir.margins)
      if (margin < report.worst_margin) {
        report.worst_margin = margin;
        report.worst_check = name;
      }
  report.pass = report.worst_margin >= -tol;
  return report;
}

double verify_exclusion_balance(const Mechanism& mech_in) {
  Mechanism mech = canonicalize(mech_in);
  return mu_bar_of(mech.rect, mech.exclusion);
}

double grown_exclusion_mass(const Mechanism& mech_in, double factor) {
  Mechanism mech = canonicalize(mech_in);
  Polygon z = mech.exclusion;
  if (z.v.empty()) return 0.0;
  Point centroid{0.0, 0.0};
  for (const Point& p : z.v) {
    centroid.x += p.x;
    centroid.y += p.y;
  }
  centroid.x /= z.v.size();
  centroid.y /= z.v.size();
  for (Point& p : z.v) {
    p.x = centroid.x + factor * (p.x - centroid.x);
    p.y = centroid.y + factor * (p.y - centroid.y);
  }
  return mu_bar_of(mech.rect, intersect_with_rect(z, mech.rect));
}

std::string report_to_json(const MyersonReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["pass"] = report.pass;
  j["worst_margin"] = report.worst_margin;
  j["worst_check"] = report.worst_check;
  nlohmann::json intervals = nlohmann::json::array();
  for (const IntervalReport& ir : report.intervals) {
    nlohmann::json m = nlohmann::json::object();
    for (const auto& [name, margin] : ir.margins) m[name] = margin;
    intervals.push_back({{"lo", ir.lo},
                         {"hi", ir.hi},
                         {"q1", ir.q1},
                         {"condition_set", ir.condition_set},
                         {"pass", ir.pass},
                         {"margins", m}});
  }
  j["intervals"] = intervals;
  return j.dump(2);
}

// ---- inequality sweeps ----------------------------------------------------

namespace {

double t_ratio() { return 3.0 * (37.0 + 3.0 * std::sqrt(465.0)) / 176.0; }

struct SweepDef {
  std::string id;
  std::string grid;
  // Evaluate margin at normalized grid coordinates (s, u) in [0,1]^2.
  std::function<double(double, double, std::array<double, 3>&)> margin;
};

// Structure-B / C solution helpers on the normalized scale (b2 = 1).
double b_delta2(double c, double b1) {
  MechanismParams p = solve_structure_b(c, b1, 1.0);
  return *p.delta2;
}
double b_margin_at(double c, double b1) {
  MechanismParams p = solve_structure_b(c, b1, 1.0);
  return structure_b_margin(c, b1, 1.0, *p.h, *p.delta_star);
}
double c_margin_at(double c, double b1) {
  MechanismParams p = solve_structure_c(c, b1, 1.0);
  return structure_c_margin(c, b1, 1.0, *p.h, *p.delta_star);
}

// Exit-point inequality along h = 0: the boundary-curve value of delta_star
// where the second B equation meets h = 0.
double exit_delta_star_h0(double c, double b1) {
  const double b2 = 1.0;
  double root = std::sqrt(3.0 * b2 * c * (8.0 * b1 - 3.0 * b2) * (2.0 * b2 - c));
  return b1 / 2.0 - b2 / 4.0 -
         (3.0 * b2 - 2.0 * b1) * root / (36.0 * b2 * (2.0 * b2 - c));
}

// Exit-point value of h where the same curve meets delta_star = b1 - b2.
double exit_h_dsmax(double c, double b1) {
  const double b2 = 1.0;
  double s = 9.0 * b2 * b2 + 4.0 * c * (b1 + 3.0 * b2);
  return (9.0 * b2 * b2 - 4.0 * c * (b1 + 3.0 * b2) + 3.0 * b2 * std::sqrt(s)) /
         (6.0 * (b1 + 3.0 * b2));
}

const std::vector<SweepDef>& sweep_defs() {
  static const std::vector<SweepDef> defs = [] {
    const double t = t_ratio();
    std::vector<SweepDef> v;
    v.push_back({"c1-2-delta2-bound",
                 "b1 in [1,1.5] x c in [1,2] (b2=1)",
                 [](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s, c = 1.0 + u;
                   pt = {c, b1, 1.0};
                   return 1.0 / 3.0 - b_delta2(c, b1);
                 }});
    v.push_back({"c1-3-b-integral-to-alpha1",
                 "b1 in [1,1.5] x c in [1, alpha1(b1)] (b2=1)",
                 [](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s;
                   double c = 1.0 + u * (compute_alpha1(b1, 1.0) - 1.0);
                   pt = {c, b1, 1.0};
                   return b_margin_at(c, b1);
                 }});
    v.push_back({"c1-4-alpha1-upper-bound",
                 "b1 in [1,1.5], c = 2(t-1)(b1-1)+1 (b2=1)",
                 [t](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * ((1.0 - 1e-4) * s + 1e-4 * u);  // flattened 1-D grid
                   double c = 2.0 * (t - 1.0) * (b1 - 1.0) + 1.0;
                   pt = {c, b1, 1.0};
                   return b1 <= 1.0 + 1e-12 ? 0.0 : -b_margin_at(c, b1);
                 }});
    v.push_back({"c2-1-exit-nonneg-h0",
                 "b1 in [1,1.5] x c in [1, 2(t-1.4)(b1-1)+1.4] (b2=1)",
                 [t](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s;
                   double hi = 2.0 * (t - 1.4) * (b1 - 1.0) + 1.4;
                   double c = 1.0 + u * (hi - 1.0);
                   pt = {c, b1, 1.0};
                   double ds = exit_delta_star_h0(c, b1);
                   return 27.0 * c - 16.0 * c * c +
                          (27.0 + 6.0 * c - 12.0 * c * c) * ds +
                          9.0 * (2.0 - c) * ds * ds;
                 }});
    v.push_back({"c2-2-exit-nonneg-dsmax",
                 "b1 in [1,1.5] x c in [1, 2(t-1.4)(b1-1)+1.4] (b2=1)",
                 [t](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s;
                   double hi = 2.0 * (t - 1.4) * (b1 - 1.0) + 1.4;
                   double c = 1.0 + u * (hi - 1.0);
                   pt = {c, b1, 1.0};
                   double h = exit_h_dsmax(c, b1);
                   double lin = 3.0 * b1 - 3.0 + 2.0 * c + 3.0 * h;
                   return 27.0 * b1 * b1 * (b1 - 1.0 + c + h) -
                          (3.0 * b1 + 1.0) * lin * lin;
                 }});
    v.push_back({"c2-4-delta2-bound",
                 "b1 in [1,1.5] x c in [1,2) (b2=1)",
                 [](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s, c = 1.0 + u * (1.0 - 1e-6);
                   pt = {c, b1, 1.0};
                   MechanismParams p = solve_structure_c(c, b1, 1.0);
                   return 1.0 / 3.0 - *p.delta2;
                 }});
    v.push_back({"c2-5-delta1-bound",
                 "b1 in [1,1.5] x c in [b1,2) (b2=1)",
                 [](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s;
                   double c = b1 + u * (2.0 - 1e-6 - b1);
                   pt = {c, b1, 1.0};
                   MechanismParams p = solve_structure_c(c, b1, 1.0);
                   return b1 / 3.0 - *p.delta1;
                 }});
    v.push_back({"c2-6-c-integral-to-alpha2",
                 "b1 in [1,1.5] x c in [1, alpha2(b1)] (b2=1)",
                 [](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * s;
                   double c = 1.0 + u * (compute_alpha2(b1, 1.0) - 1.0);
                   pt = {c, b1, 1.0};
                   return c_margin_at(c, b1);
                 }});
    v.push_back({"c2-7-alpha2-bracket",
                 "b1 in [1,1.5]; signs at c = 2(t-1.36)(b1-1)+1.36 and 2(t-1.4)(b1-1)+1.4",
                 [t](double s, double u, std::array<double, 3>& pt) {
                   double b1 = 1.0 + 0.5 * ((1.0 - 1e-4) * s + 1e-4 * u);  // flattened 1-D grid
                   double lo = 2.0 * (t - 1.36) * (b1 - 1.0) + 1.36;
                   double hi = 2.0 * (t - 1.4) * (b1 - 1.0) + 1.4;
                   pt = {lo, b1, 1.0};
                   return std::min(c_margin_at(lo, b1), -c_margin_at(hi, b1));
                 }});
    return v;
  }();
  return defs;
}

}  // namespace

const std::vector<std::string>& certify_check_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const SweepDef& d : sweep_defs()) v.push_back(d.id);
    return v;
  }();
  return ids;
}

SweepReport certify_sweep(const std::string& check_id, int grid_n, int workers,
                          double tol) {
  if (grid_n < 2) throw std::domain_error("certify_sweep: grid must be at least 2x2");
  const SweepDef* def = nullptr;
  for (const SweepDef& d : sweep_defs())
    if (d.id == check_id) def = &d;
  if (!def) throw std::domain_error("certify_sweep: unknown check id " + check_id);

  SweepReport report;
  report.check_id = def->id;
  report.grid = def->grid;
  const int n = grid_n;
  report.rows.assign(static_cast<size_t>(n) * n, {});

  int nw = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  nw = std::max(1, std::min(nw, n));
  std::vector<std::thread> pool;
  for (int w = 0; w < nw; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < n; i += nw)
        for (int j = 0; j < n; ++j) {
          double s = static_cast<double>(i) / (n - 1);
          double u = static_cast<double>(j) / (n - 1);
          std::array<double, 3> pt{};
          double margin = def->margin(s, u, pt);
          report.rows[static_cast<size_t>(i) * n + j] = {pt[0], pt[1], pt[2], margin};
        }
    });
  for (std::thread& th : pool) th.join();

  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& row : report.rows)
    if (row[3] < report.worst_margin) {
      report.worst_margin = row[3];
      report.worst_point = {row[0], row[1], row[2]};
    }
  report.pass = report.worst_margin >= -tol;
  return report;
}

std::string sweep_to_csv(const SweepReport& report) {
  std::ostringstream out;
  out.precision(15);
  out << "c,b1,b2,margin\n";
  for (const auto& row : report.rows)
    out << row[0] << ',' << row[1] << ',' << row[2] << ',' << row[3] << '\n';
  return out.str();
}

std::string sweep_to_json(const SweepReport& report) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["check_id"] = report.check_id;
  j["grid"] = report.grid;
  j["worst_margin"] = report.worst_margin;
  j["worst_point"] = report.worst_point;
  j["pass"] = report.pass;
  return j.dump(2);
}

}  // namespace menuforge
