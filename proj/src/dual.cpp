#include "menuforge/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "menuforge/measure.hpp"
#include "menuforge/solver.hpp"

namespace menuforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTol = 1e-12;

double require(const std::optional<double>& v, const char* what) {
  if (!v) throw std::logic_error(std::string("missing parameter ") + what);
  return *v;
}

// ---- Gauss-Legendre (7 point) on [a, b] -----------------------------------

template <typename F>
double gauss7(F&& f, double a, double b) {
  static const double x[7] = {-0.9491079123427585, -0.7415311855993945,
                              -0.4058451513773972, 0.0,
                              0.4058451513773972,  0.7415311855993945,
                              0.9491079123427585};
  static const double w[7] = {0.1294849661688697, 0.2797053914892766,
                              0.3818300505051189, 0.4179591836734694,
                              0.3818300505051189, 0.2797053914892766,
                              0.1294849661688697};
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += w[i] * f(mid + half * x[i]);
  return s * half;
}

// Integrate f over [lo, hi] splitting at the given sorted breakpoints and
// subdividing each cell (integrands are piecewise smooth between breaks).
template <typename F>
double integrate(F&& f, const std::vector<double>& breaks, int subdiv = 8) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const double a = breaks[i], b = breaks[i + 1];
    if (b - a <= kTol) continue;
    const double h = (b - a) / subdiv;
    for (int k = 0; k < subdiv; ++k) total += gauss7(f, a + k * h, a + (k + 1) * h);
  }
  return total;
}

// ---- fiber geometry --------------------------------------------------------

// Largest w such that (delta + w, w) (offset coordinates) lies in the convex
// polygon, restricted to [wmin, wmax]; -inf if the fiber misses it.
double upper_exit(const Polygon& poly, double delta, double wmin, double wmax) {
  if (poly.size() < 3) return -kInf;
  double lo = wmin, hi = wmax;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point p = poly.v[i], q = poly.v[(i + 1) % n];
    const double ex = q.x - p.x, ey = q.y - p.y;
    // interior of a CCW polygon: cross(e, y - p) >= 0 with y = (delta+w, w)
    const double A = ex - ey;
    const double B = ex * (-p.y) - ey * (delta - p.x);
    if (A > kTol) {
      lo = std::max(lo, -B / A);
    } else if (A < -kTol) {
      hi = std::min(hi, -B / A);
    } else if (B < -kTol) {
      return -kInf;
    }
  }
  return hi >= lo - kTol ? hi : -kInf;
}

Polygon offset_polygon(const Polygon& p, double c1, double c2) {
  Polygon out = p;
  for (auto& v : out.v) {
    v.x -= c1;
    v.y -= c2;
  }
  return out;
}

// Linear density piece with the two standard corrections of examples 1-2:
// ramp 3t-1 on [0, 2/3] and [2/3, 1-d2], cap 3t + 3a(1-t-d2) - c - 1 beyond.
void append_alpha_beta(std::vector<SegmentMeasure>& out, const std::string& tag,
                       Point start, Point end, double c, double d2, double a) {
  SegmentMeasure alpha;
  alpha.name = "alpha" + tag;
  alpha.start = start;
  alpha.end = end;
  alpha.p_lo = 0.0;
  alpha.p_hi = 1.0;
  alpha.pieces.push_back({0.0, 2.0 / 3.0, -1.0, 1.0});
  out.push_back(alpha);

  SegmentMeasure beta;
  beta.name = "beta" + tag;
  beta.start = start;
  beta.end = end;
  beta.p_lo = 0.0;
  beta.p_hi = 1.0;
  beta.pieces.push_back({2.0 / 3.0, 1.0 - d2, 1.0, 3.0 * (1.0 - d2) - 1.0});
  const double f1 = 3.0 * (1.0 - d2) - c - 1.0;          // cap at t = 1 - d2
  const double f2 = 3.0 - 3.0 * a * d2 - c - 1.0;        // cap at t = 1
  beta.pieces.push_back({1.0 - d2, 1.0, f1, f2});
  out.push_back(beta);
}

struct EdgeDensity {
  double mu_top, mu_right, mu_bottom, mu_left, rho;
};

EdgeDensity edge_densities(const SupportRect& r) {
  const double bb = r.b1 * r.b2;
  return {(r.c2 + r.b2) / bb, (r.c1 + r.b1) / bb, r.c2 / bb, r.c1 / bb, 3.0 / bb};
}

double shuffle_sum(const TransportPlan& plan, bool top, double t) {
  double s = 0.0;
  for (const auto& m : plan.shuffles) {
    const bool is_top = std::abs(m.start.y - m.end.y) <= kTol;
    const bool is_right = std::abs(m.start.x - m.end.x) <= kTol;
    if (top && is_top)
      s += m.density(t);
    else if (!top && is_right && m.name != "alpha_h")  // horizontal family
      s += m.density(t);
  }
  return s;
}

const SegmentMeasure* find_measure(const TransportPlan& plan, const std::string& name) {
  for (const auto& m : plan.shuffles)
    if (m.name == name) return &m;
  return nullptr;
}

}  // namespace

// ---- SegmentMeasure --------------------------------------------------------

Point SegmentMeasure::point_at(double p) const {
  const double s = (p - p_lo) / (p_hi - p_lo);
  return {start.x + s * (end.x - start.x), start.y + s * (end.y - start.y)};
}

double SegmentMeasure::density(double p) const {
  for (const auto& pc : pieces) {
    if (p >= pc.p_lo - kTol && p <= pc.p_hi + kTol) {
      const double s = (pc.p_hi - pc.p_lo <= kTol)
                           ? 0.5
                           : (p - pc.p_lo) / (pc.p_hi - pc.p_lo);
      return pc.f_lo + s * (pc.f_hi - pc.f_lo);
    }
  }
  return 0.0;
}

double SegmentMeasure::mass() const {
  double m = 0.0;
  for (const auto& pc : pieces) m += 0.5 * (pc.f_lo + pc.f_hi) * (pc.p_hi - pc.p_lo);
  for (const auto& a : atoms) m += a.second;
  return m;
}

double SegmentMeasure::first_moment() const {
  double m = 0.0;
  for (const auto& pc : pieces) {
    const double L = pc.p_hi - pc.p_lo;
    // integral of (p - p_lo) * f(p) with f linear
    const double a0 = pc.p_lo - p_lo;
    m += L * (a0 * (pc.f_lo + pc.f_hi) / 2.0 + L * (pc.f_lo / 6.0 + pc.f_hi / 3.0));
  }
  for (const auto& a : atoms) m += (a.first - p_lo) * a.second;
  return m;
}

double SegmentMeasure::hinge_integral(double k) const {
  double m = 0.0;
  for (const auto& pc : pieces) {
    const double lo = std::max(pc.p_lo, k), hi = pc.p_hi;
    if (hi - lo <= 0.0) continue;
    // integrand (p-k) * f(p) is quadratic: Simpson is exact
    auto f = [&](double p) {
      const double s = (pc.p_hi - pc.p_lo <= kTol)
                           ? 0.5
                           : (p - pc.p_lo) / (pc.p_hi - pc.p_lo);
      return (p - k) * (pc.f_lo + s * (pc.f_hi - pc.f_lo));
    };
    m += (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi));
  }
  for (const auto& a : atoms)
    if (a.first > k) m += (a.first - k) * a.second;
  return m;
}

DominanceReport check_convex_dominance(const SegmentMeasure& m, int grid, double tol) {
  DominanceReport rep;
  rep.total_mass = m.mass();
  rep.first_moment = m.first_moment();
  rep.min_hinge = kInf;
  for (int i = 0; i < grid; ++i) {
    const double k = m.p_lo + (m.p_hi - m.p_lo) * i / (grid - 1.0);
    const double h = m.hinge_integral(k);
    if (h < rep.min_hinge) {
      rep.min_hinge = h;
      rep.min_hinge_at = k;
    }
  }
  rep.pass = std::abs(rep.total_mass) <= tol && rep.first_moment >= -tol &&
             rep.min_hinge >= -tol;
  return rep;
}

SegmentMeasure combine_measures(const std::string& name,
                                const std::vector<SegmentMeasure>& ms) {
  if (ms.empty()) throw std::domain_error("combine_measures: empty input");
  SegmentMeasure out;
  out.name = name;
  out.start = ms.front().start;
  out.end = ms.front().end;
  out.p_lo = ms.front().p_lo;
  out.p_hi = ms.front().p_hi;
  std::vector<double> cuts{out.p_lo, out.p_hi};
  for (const auto& m : ms) {
    out.p_lo = std::min(out.p_lo, m.p_lo);
    out.p_hi = std::max(out.p_hi, m.p_hi);
    for (const auto& pc : m.pieces) {
      cuts.push_back(pc.p_lo);
      cuts.push_back(pc.p_hi);
    }
    for (const auto& a : m.atoms) out.atoms.push_back(a);
  }
  cuts.push_back(out.p_lo);
  cuts.push_back(out.p_hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < kTol; }),
             cuts.end());
  auto total = [&](double p) {
    double s = 0.0;
    for (const auto& m : ms) s += m.density(p);
    return s;
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    // sample two interior points and extrapolate the (exactly linear) sum
    const double p1 = a + (b - a) / 3.0, p2 = a + 2.0 * (b - a) / 3.0;
    const double f1 = total(p1), f2 = total(p2);
    const double slope = (f2 - f1) / (p2 - p1);
    out.pieces.push_back({a, b, f1 - slope * (p1 - a), f1 + slope * (b - p1)});
  }
  return out;
}

// ---- plan construction -----------------------------------------------------

TransportPlan build_example(int n) {
  TransportPlan plan;
  plan.example = n;
  if (n == 1) {
    plan.mech = make_mechanism(solve(1.26, 1.0, 1.0));
    const SupportRect& r = plan.mech.rect;
    const double c = r.c1;
    const double d2 = require(plan.mech.params.delta2, "delta2");
    const double a = require(plan.mech.params.a2, "a2");
    append_alpha_beta(plan.shuffles, "1", {c, c + 1.0}, {c + 1.0, c + 1.0}, c, d2, a);
    append_alpha_beta(plan.shuffles, "2", {c + 1.0, c}, {c + 1.0, c + 1.0}, c, d2, a);
    plan.dominance_groups = {{0}, {1}, {2}, {3}};
  } else if (n == 2) {
    plan.mech = make_mechanism(solve(1.5, 1.0, 1.0));
    const SupportRect& r = plan.mech.rect;
    const double c = r.c1;
    const double dm = require(plan.mech.params.delta2, "delta2");  // sqrt(5/3)-1
    const double s33 = std::sqrt(33.0);
    const double as = (27.0 - 3.0 * s33) / 32.0;
    const double ds = ((3.0 + s33) / 8.0 - 1.0) / as;
    plan.shuffle_a = as;
    plan.shuffle_delta = ds;
    append_alpha_beta(plan.shuffles, "1", {c, c + 1.0}, {c + 1.0, c + 1.0}, c, ds, as);
    append_alpha_beta(plan.shuffles, "2", {c + 1.0, c}, {c + 1.0, c + 1.0}, c, ds, as);

    // anti-diagonal correction on z1 + z2 = 2c + ds, parameterized by the
    // offset difference p = z1 - z2 in [-ds, ds]; even in p.
    SegmentMeasure lam;
    lam.name = "lambda";
    lam.start = {c, c + ds};
    lam.end = {c + ds, c};
    lam.p_lo = -ds;
    lam.p_hi = ds;
    const double ramp_hi = 3.0 * as * (ds - dm) + c;  // value as p -> -dm^-
    // inner branch 3(1+p)(as-1/2) + (3/2)(1-dm) - 3 as (1-ds)
    auto inner = [&](double p) {
      return 3.0 * (1.0 + p) * (as - 0.5) + 1.5 * (1.0 - dm) - 3.0 * as * (1.0 - ds);
    };
    lam.pieces.push_back({-ds, -dm, c, ramp_hi});
    lam.pieces.push_back({-dm, 0.0, inner(-dm), inner(0.0)});
    lam.pieces.push_back({0.0, dm, inner(0.0), inner(-dm)});
    lam.pieces.push_back({dm, ds, ramp_hi, c});
    plan.shuffles.push_back(lam);
    plan.dominance_groups = {{0}, {1}, {2}, {3}, {4}};

    const double q = as * ds;
    plan.aux_quad.v = {{0.0, 0.0}, {ds, 0.0}, {q, q}, {0.0, ds}};
  } else if (n == 3) {
    plan.mech = make_mechanism(solve(0.0, 1.2, 1.0));
    const double d1 = require(plan.mech.params.delta1, "delta1");
    const double d2 = require(plan.mech.params.delta2, "delta2");
    const double dstar = d1 - d2;
    const double inv = 1.0 / 1.2;

    SegmentMeasure alpha;  // top edge, parameter t = z1
    alpha.name = "alpha";
    alpha.start = {0.0, 1.0};
    alpha.end = {1.2, 1.0};
    alpha.p_lo = 0.0;
    alpha.p_hi = 1.2;
    alpha.pieces.push_back({0.0, 1.0 - d2, -inv, (3.0 * (1.0 - d2) - 1.0) * inv});
    const double cap = (2.0 - 3.0 * d2) * inv;
    alpha.pieces.push_back({1.0 - d2, 1.0 + dstar, cap, cap});
    plan.shuffles.push_back(alpha);

    SegmentMeasure ao;  // right edge, parameter t' = z2, oblique part
    ao.name = "alpha_o";
    ao.start = {1.2, 0.0};
    ao.end = {1.2, 1.0};
    ao.p_lo = 0.0;
    ao.p_hi = 1.0;
    ao.pieces.push_back({0.0, 1.2 - d1, -1.2 * inv, (3.0 * (1.2 - d1) - 1.2) * inv});
    const double cap_o = (2.4 - 3.0 * d1) * inv;
    ao.pieces.push_back({1.2 - d1, 1.0, cap_o, cap_o});
    plan.shuffles.push_back(ao);

    SegmentMeasure ah;  // right edge, horizontal part
    ah.name = "alpha_h";
    ah.start = {1.2, 0.0};
    ah.end = {1.2, 1.0};
    ah.p_lo = 0.0;
    ah.p_hi = 1.0;
    ah.pieces.push_back({d1 - 0.2, d2, 0.0, 3.0 * (d2 - d1 + 0.2) * inv});
    const double cap_h = 3.0 * (0.2 - dstar) * inv;
    ah.pieces.push_back({d2, 2.0 / 3.0, cap_h, cap_h});
    plan.shuffles.push_back(ah);
    plan.dominance_groups = {{0}, {1, 2}};
  } else {
    throw std::domain_error("build_example: n must be 1, 2, or 3");
  }

  // quadrature breakpoints of the fiber index delta
  const SupportRect& r = plan.mech.rect;
  std::vector<double> bp{-r.b2, 0.0, r.b1 - r.b2, r.b1, -r.b2 / 3.0, r.b1 / 3.0};
  for (const auto& m : plan.shuffles) {
    const bool is_top = std::abs(m.start.y - m.end.y) <= kTol;
    const bool is_right = std::abs(m.start.x - m.end.x) <= kTol;
    for (const auto& pc : m.pieces)
      for (double p : {pc.p_lo, pc.p_hi}) {
        if (is_top)
          bp.push_back(p - r.b2);
        else if (is_right)
          bp.push_back(r.b1 - p);
        else
          bp.push_back(p);  // anti-diagonal measure already indexed by delta
      }
  }
  const Polygon zoff = offset_polygon(plan.mech.exclusion, r.c1, r.c2);
  for (const auto& v : zoff.v) bp.push_back(v.x - v.y);
  for (const auto& v : plan.aux_quad.v) bp.push_back(v.x - v.y);
  for (double d : allocation_breakpoints(plan.mech)) bp.push_back(d);
  if (plan.example == 2) {
    // sign change of the anti-diagonal density (inner branch root)
    const double as = plan.shuffle_a, ds = plan.shuffle_delta;
    const double dm = require(plan.mech.params.delta2, "delta2");
    const double root =
        -1.0 + (3.0 * as * (1.0 - ds) - 1.5 * (1.0 - dm)) / (3.0 * (as - 0.5));
    bp.push_back(root);
    bp.push_back(-root);
  }
  if (plan.example == 3) {
    const double d1 = require(plan.mech.params.delta1, "delta1");
    const double d2 = require(plan.mech.params.delta2, "delta2");
    bp.push_back(d1 - d2);
    bp.push_back(-d2);
    bp.push_back(d1);
    bp.push_back(1.2 - d2);
    bp.push_back(1.4 - d1);
    plan.horizontal_breaks = {d1 - 0.2, d2, 2.0 / 3.0};
  }
  std::vector<double> clean;
  for (double d : bp)
    if (d > -r.b2 - kTol && d < r.b1 + kTol) clean.push_back(std::clamp(d, -r.b2, r.b1));
  std::sort(clean.begin(), clean.end());
  clean.erase(std::unique(clean.begin(), clean.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-11; }),
              clean.end());
  plan.delta_breaks = clean;
  return plan;
}

// ---- transfers -------------------------------------------------------------

std::vector<FiberTransfer> fiber_transfers(const TransportPlan& plan, double delta) {
  const SupportRect& r = plan.mech.rect;
  if (delta <= -r.b2 + kTol || delta >= r.b1 - kTol) return {};
  const EdgeDensity ed = edge_densities(r);
  const double wmin = std::max(0.0, -delta);
  const double wmax = std::min(r.b2, r.b1 - delta);
  const Polygon zoff = offset_polygon(plan.mech.exclusion, r.c1, r.c2);
  const double zexit = upper_exit(zoff, delta, wmin, wmax);

  FiberTransfer bd;  // boundary source (kernel case b / c / d oblique part)
  if (delta <= r.b1 - r.b2) {
    const double t = delta + r.b2;
    bd.source = {r.c1 + t, r.c2 + r.b2};
    bd.source_density = ed.mu_top + shuffle_sum(plan, true, t);
  } else {
    const double tp = r.b1 - delta;
    bd.source = {r.c1 + r.b1, r.c2 + tp};
    bd.source_density = ed.mu_right + shuffle_sum(plan, false, tp);
  }
  bd.area_hi = wmax;

  std::vector<FiberTransfer> out;
  if (plan.example == 1 || plan.example == 3) {
    if (zexit > wmin + kTol) {
      bd.area_lo = zexit;
    } else {
      bd.area_lo = wmin;
      const double atom = delta >= 0.0 ? ed.mu_bottom : ed.mu_left;
      if (atom > kTol) bd.atom_sinks.push_back({wmin, atom});
    }
    if (plan.example == 3) {
      const double d1 = require(plan.mech.params.delta1, "delta1");
      const double dstar = d1 - require(plan.mech.params.delta2, "delta2");
      if (delta > dstar && delta <= r.b1 - r.b2)
        bd.area_lo = 2.0 / 3.0;  // restricted oblique transfer from the top
    }
    out.push_back(bd);
    return out;
  }

  // example 2. The auxiliary quadrilateral is non-convex (its diagonal
  // vertex sits below the exclusion boundary), so its fiber exit comes from
  // the explicit dotted-line pair instead of half-plane clipping.
  const double ds = plan.shuffle_delta;
  const double as = plan.shuffle_a;
  const double qexit = std::abs(delta) <= ds
                           ? (delta <= 0.0 ? as * ds - (1.0 - as) * delta
                                           : as * (ds - delta))
                           : -kInf;
  const double stop = std::max(zexit, qexit);
  if (stop > wmin + kTol) {
    bd.area_lo = stop;
  } else {
    bd.area_lo = wmin;
    bd.atom_sinks.push_back({wmin, delta >= 0.0 ? ed.mu_bottom : ed.mu_left});
  }
  const SegmentMeasure* lam = find_measure(plan, "lambda");
  const double lv = lam->density(delta);
  if (lv < 0.0) bd.atom_sinks.push_back({0.5 * (ds - delta), -lv});
  out.push_back(bd);

  if (lv > 0.0) {
    FiberTransfer tr;  // anti-diagonal source into the sliver triangles
    tr.source = {r.c1 + 0.5 * (ds + delta), r.c2 + 0.5 * (ds - delta)};
    tr.source_density = lv;
    tr.area_hi = qexit;
    if (zexit > wmin + kTol) {
      tr.area_lo = zexit;
    } else {
      tr.area_lo = wmin;
      tr.atom_sinks.push_back({wmin, delta >= 0.0 ? ed.mu_bottom : ed.mu_left});
    }
    out.push_back(tr);
  }
  return out;
}

bool horizontal_transfer(const TransportPlan& plan, double v, HorizontalTransfer* out) {
  if (plan.example != 3) return false;
  const SegmentMeasure* ah = find_measure(plan, "alpha_h");
  const double d = ah->density(v);
  if (d <= 0.0) return false;
  const double d1 = require(plan.mech.params.delta1, "delta1");
  const double dstar = d1 - require(plan.mech.params.delta2, "delta2");
  out->source = {1.2, v};
  out->source_density = d;
  out->y1_lo = std::max(d1, v + dstar);
  out->y1_hi = v + 0.2;
  return true;
}

// ---- cost ------------------------------------------------------------------

double dual_cost(const TransportPlan& plan) {
  const SupportRect& r = plan.mech.rect;
  const double rho = 3.0 / (r.b1 * r.b2);
  auto fiber_cost = [&](double delta) {
    double s = 0.0;
    for (const auto& tr : fiber_transfers(plan, delta)) {
      const double ws = tr.source.y - r.c2;
      if (tr.area_hi > tr.area_lo)
        s += rho * 0.5 *
             ((ws - tr.area_lo) * (ws - tr.area_lo) -
              (ws - tr.area_hi) * (ws - tr.area_hi));
      for (const auto& a : tr.atom_sinks) s += a.second * (ws - a.first);
    }
    return s;
  };
  double cost = integrate(fiber_cost, plan.delta_breaks);
  if (!plan.horizontal_breaks.empty()) {
    auto hcost = [&](double v) {
      HorizontalTransfer h;
      if (!horizontal_transfer(plan, v, &h)) return 0.0;
      const double x1 = h.source.x;
      return rho * 0.5 *
             ((x1 - h.y1_lo) * (x1 - h.y1_lo) - (x1 - h.y1_hi) * (x1 - h.y1_hi));
    };
    cost += integrate(hcost, plan.horizontal_breaks);
  }
  return cost;
}

// ---- marginal identity -----------------------------------------------------

MarginalReport check_marginals(const TransportPlan& plan, int n_segments,
                               std::uint64_t seed) {
  const SupportRect& r = plan.mech.rect;
  const double rho = 3.0 / (r.b1 * r.b2);
  MarginalReport rep;

  // per-transfer conservation on a dense fiber grid
  for (std::size_t i = 0; i + 1 < plan.delta_breaks.size(); ++i) {
    const double a = plan.delta_breaks[i], b = plan.delta_breaks[i + 1];
    for (int k = 0; k < 25; ++k) {
      const double delta = a + (b - a) * (k + 0.5) / 25.0;
      for (const auto& tr : fiber_transfers(plan, delta)) {
        double sink = rho * std::max(0.0, tr.area_hi - tr.area_lo);
        for (const auto& at : tr.atom_sinks) sink += at.second;
        rep.worst_fiber_residual =
            std::max(rep.worst_fiber_residual, std::abs(tr.source_density - sink));
      }
    }
  }
  for (std::size_t i = 0; i + 1 < plan.horizontal_breaks.size(); ++i) {
    const double a = plan.horizontal_breaks[i], b = plan.horizontal_breaks[i + 1];
    for (int k = 0; k < 25; ++k) {
      HorizontalTransfer h;
      if (!horizontal_transfer(plan, a + (b - a) * (k + 0.5) / 25.0, &h)) continue;
      rep.worst_fiber_residual =
          std::max(rep.worst_fiber_residual,
                   std::abs(h.source_density - rho * (h.y1_hi - h.y1_lo)));
    }
  }

  // (gamma1 - gamma2 - mu_bar) == shuffling sum on random support segments
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const EdgeDensity ed = edge_densities(r);
  const SegmentMeasure* lam = find_measure(plan, "lambda");
  for (int s = 0; s < n_segments; ++s) {
    const int which = static_cast<int>(rng() % (lam ? 5 : 4));
    double lo, hi;
    double lhs = 0.0, rhs = 0.0;
    auto span = [&](double a, double b) {
      lo = a + (b - a) * uni(rng);
      hi = lo + (b - lo) * uni(rng);
    };
    if (which == 0 || which == 1) {
      // top (0) / right (1) edge: gamma1 = source density, no sinks there
      span(which == 0 ? -r.b2 : r.b1 - r.b2, which == 0 ? r.b1 - r.b2 : r.b1);
      lhs = integrate(
          [&](double d) {
            auto trs = fiber_transfers(plan, d);
            const double mu = d <= r.b1 - r.b2 ? ed.mu_top : ed.mu_right;
            return trs.empty() ? 0.0 : trs.front().source_density - mu;
          },
          {lo, hi}, 4);
      const bool top = which == 0;
      rhs = integrate(
          [&](double d) {
            return shuffle_sum(plan, top, top ? d + r.b2 : r.b1 - d) +
                   (plan.example == 3 && !top
                        ? find_measure(plan, "alpha_h")->density(r.b1 - d)
                        : 0.0);
          },
          {lo, hi}, 4);
      if (plan.example == 3 && !top) {
        // horizontal sources on the right edge belong to gamma1 as well
        lhs += integrate(
            [&](double d) {
              HorizontalTransfer h;
              return horizontal_transfer(plan, r.b1 - d, &h) ? h.source_density : 0.0;
            },
            {lo, hi}, 4);
      }
    } else if (which == 2 || which == 3) {
      // bottom (2) / left (3) edge outside the exclusion region:
      // gamma2 receives exactly -mu_s there, so lhs should vanish.
      span(which == 2 ? 0.5 * r.b1 : -r.b2, which == 2 ? r.b1 : -0.5 * r.b2);
      lhs = integrate(
          [&](double d) {
            double sunk = 0.0;
            for (const auto& tr : fiber_transfers(plan, d))
              for (const auto& at : tr.atom_sinks)
                if (at.first <= std::max(0.0, -d) + kTol) sunk += at.second;
            return -sunk + (which == 2 ? ed.mu_bottom : ed.mu_left);
          },
          {lo, hi}, 4);
      rhs = 0.0;
    } else {
      // anti-diagonal line: gamma1 - gamma2 = lambda_+ - lambda_-
      span(lam->p_lo, lam->p_hi);
      lhs = integrate(
          [&](double d) {
            double v = 0.0;
            const auto trs = fiber_transfers(plan, d);
            if (trs.size() > 1) v += trs.back().source_density;
            if (!trs.empty())
              for (const auto& at : trs.front().atom_sinks)
                if (std::abs(at.first - 0.5 * (plan.shuffle_delta - d)) <= kTol &&
                    at.first > std::max(0.0, -d) + kTol)
                  v -= at.second;
            return v;
          },
          {lo, hi}, 4);
      rhs = integrate([&](double d) { return lam->density(d); }, {lo, hi}, 4);
    }
    rep.worst_segment_residual =
        std::max(rep.worst_segment_residual, std::abs(lhs - rhs));
  }
  rep.pass = rep.worst_fiber_residual <= 1e-9 && rep.worst_segment_residual <= 1e-9;
  return rep;
}

// ---- complementary slackness -----------------------------------------------

namespace {

double mech_utility(const Mechanism& mech, Point z) {
  double best = 0.0;
  for (const auto& it : mech.menu.items) best = std::max(best, it.utility(z));
  return best;
}

// exact integral of u along the fiber w -> (c1 + delta + w, c2 + w):
// u is a max of affine functions, so split at pairwise tie points.
double integral_u_fiber(const Mechanism& mech, double delta, double wlo, double whi) {
  const SupportRect& r = mech.rect;
  std::vector<double> cuts{wlo, whi};
  const auto& items = mech.menu.items;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const double dq1 = items[i].q1 - items[j].q1, dq2 = items[i].q2 - items[j].q2;
      const double denom = dq1 + dq2;
      if (std::abs(denom) < kTol) continue;
      const double w = (items[i].price - items[j].price -
                        dq1 * (r.c1 + delta) + dq2 * (-r.c2)) /
                       denom;
      if (w > wlo && w < whi) cuts.push_back(w);
    }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  auto u = [&](double w) {
    return mech_utility(mech, {r.c1 + delta + w, r.c2 + w});
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= kTol) continue;
    total += 0.5 * (u(a) + u(b)) * (b - a);  // u affine between ties
  }
  return total;
}

double integral_u_horizontal(const Mechanism& mech, double y2, double xlo, double xhi) {
  std::vector<double> cuts{xlo, xhi};
  const auto& items = mech.menu.items;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      const double dq1 = items[i].q1 - items[j].q1;
      if (std::abs(dq1) < kTol) continue;
      const double x =
          (items[i].price - items[j].price - (items[i].q2 - items[j].q2) * y2) / dq1;
      if (x > xlo && x < xhi) cuts.push_back(x);
    }
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b - a <= kTol) continue;
    total += 0.5 * (mech_utility(mech, {a, y2}) + mech_utility(mech, {b, y2})) * (b - a);
  }
  return total;
}

}  // namespace

SlacknessReport check_complementary_slackness(const Mechanism& mech,
                                              const TransportPlan& plan,
                                              int samples, std::uint64_t seed) {
  const SupportRect& r = mech.rect;
  const double rho = 3.0 / (r.b1 * r.b2);
  SlacknessReport rep;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  int done = 0;
  const bool horizontal = !plan.horizontal_breaks.empty();
  while (done < samples) {
    if (horizontal && (rng() & 7u) == 0u) {
      const double v = plan.horizontal_breaks.front() +
                       (plan.horizontal_breaks.back() - plan.horizontal_breaks.front()) *
                           uni(rng);
      HorizontalTransfer h;
      if (!horizontal_transfer(plan, v, &h)) continue;
      const double y1 = h.y1_lo + (h.y1_hi - h.y1_lo) * uni(rng) + plan.perturb_offset;
      const Point y{y1, h.source.y};
      const double dist = std::max(std::abs(h.source.x - y.x), std::abs(h.source.y - y.y));
      rep.max_kernel_violation =
          std::max(rep.max_kernel_violation,
                   std::abs(mech_utility(mech, h.source) - mech_utility(mech, y) - dist));
      ++done;
      continue;
    }
    const double delta = -r.b2 + (r.b1 + r.b2) * uni(rng);
    const auto trs = fiber_transfers(plan, delta);
    if (trs.empty()) continue;
    for (const auto& tr : trs) {
      std::vector<double> targets;
      if (tr.area_hi > tr.area_lo + kTol)
        targets.push_back(tr.area_lo + (tr.area_hi - tr.area_lo) * uni(rng));
      for (const auto& at : tr.atom_sinks) targets.push_back(at.first);
      for (double w : targets) {
        const Point y{r.c1 + delta + w + plan.perturb_offset, r.c2 + w};
        const double dist =
            std::max(std::abs(tr.source.x - y.x), std::abs(tr.source.y - y.y));
        rep.max_kernel_violation = std::max(
            rep.max_kernel_violation,
            std::abs(mech_utility(mech, tr.source) - mech_utility(mech, y) - dist));
        ++done;
      }
    }
  }

  // pairing identity: integral of u d(gamma1 - gamma2) vs integral of u d(mu_bar)
  auto fiber_pair = [&](double delta) {
    double s = 0.0;
    for (const auto& tr : fiber_transfers(plan, delta)) {
      s += tr.source_density * mech_utility(mech, tr.source);
      if (tr.area_hi > tr.area_lo + kTol)
        s -= rho * integral_u_fiber(mech, delta, tr.area_lo, tr.area_hi);
      for (const auto& at : tr.atom_sinks)
        s -= at.second * mech_utility(mech, {r.c1 + delta + at.first, r.c2 + at.first});
    }
    return s;
  };
  double pair_int = integrate(fiber_pair, plan.delta_breaks);
  if (horizontal) {
    pair_int += integrate(
        [&](double v) {
          HorizontalTransfer h;
          if (!horizontal_transfer(plan, v, &h)) return 0.0;
          return h.source_density * mech_utility(mech, h.source) -
                 rho * integral_u_horizontal(mech, h.source.y, h.y1_lo, h.y1_hi);
        },
        plan.horizontal_breaks);
  }
  rep.pairing_gap = std::abs(pair_int - revenue_via_measure(mech));
  rep.pass = rep.max_kernel_violation <= 1e-9 && rep.pairing_gap <= 1e-6;
  return rep;
}

DualityReport strong_duality(const TransportPlan& plan, double tol) {
  DualityReport rep;
  rep.primal = revenue(plan.mech);
  rep.dual = dual_cost(plan);
  rep.gap = std::abs(rep.primal - rep.dual);
  rep.pass = rep.gap <= tol;
  return rep;
}

std::string density_csv(const TransportPlan& plan, int samples_per_piece) {
  std::ostringstream os;
  os.precision(12);
  os << "measure,p,z1,z2,density\n";
  for (const auto& m : plan.shuffles) {
    for (const auto& pc : m.pieces) {
      for (int i = 0; i <= samples_per_piece; ++i) {
        const double p = pc.p_lo + (pc.p_hi - pc.p_lo) * i / samples_per_piece;
        const Point z = m.point_at(p);
        os << m.name << ',' << p << ',' << z.x << ',' << z.y << ',' << m.density(p)
           << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace menuforge
