#include "menuforge/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace menuforge {

namespace {

// Overlap span of a clipped convex region with an axis-aligned line.
// axis==0: line {y == level}, span measured in x; axis==1: line {x == level},
// span measured in y. Returns {lo, hi} with lo<=hi, or an empty span.
struct Span {
  double lo = 0.0, hi = 0.0;
  bool present = false;
};

Span line_overlap(const Polygon& r, int axis, double level, double tol) {
  Span s;
  for (const Point& p : r.v) {
    double coord = axis == 0 ? p.y : p.x;
    double along = axis == 0 ? p.x : p.y;
    if (std::abs(coord - level) <= tol) {
      if (!s.present) {
        s.lo = s.hi = along;
        s.present = true;
      } else {
        s.lo = std::min(s.lo, along);
        s.hi = std::max(s.hi, along);
      }
    }
  }
  return s;
}

Point polygon_centroid(const Polygon& p) {
  const auto& v = p.v;
  double a = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point& p0 = v[i];
    const Point& p1 = v[(i + 1) % v.size()];
    double cross = p0.x * p1.y - p1.x * p0.y;
    a += cross;
    cx += (p0.x + p1.x) * cross;
    cy += (p0.y + p1.y) * cross;
  }
  if (std::abs(a) < 1e-300) return v.empty() ? Point{} : v[0];
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

// Shared decomposition: calls back with (weight, point or segment integral).
// For an affine integrand u this is exact.
template <typename AreaFn, typename EdgeFn, typename AtomFn>
void decompose_mu_bar(const SupportRect& rect, const Polygon& region, AreaFn on_area,
                      EdgeFn on_edge, AtomFn on_atom) {
  Polygon r = intersect_with_rect(region, rect);
  if (r.empty()) return;
  double scale = std::max({1.0, std::abs(rect.c1) + rect.b1, std::abs(rect.c2) + rect.b2});
  double tol = 1e-9 * scale;
  double inv = 1.0 / (rect.b1 * rect.b2);

  on_area(r);

  struct Edge {
    int axis;
    double level;
    double density;
  };
  const Edge edges[4] = {
      {0, rect.c2, -rect.c2 * inv},              // bottom
      {1, rect.c1, -rect.c1 * inv},              // left
      {0, rect.c2 + rect.b2, (rect.c2 + rect.b2) * inv},  // top
      {1, rect.c1 + rect.b1, (rect.c1 + rect.b1) * inv},  // right
  };
  for (const Edge& e : edges) {
    Span s = line_overlap(r, e.axis, e.level, tol);
    if (s.present && s.hi - s.lo > 0.0) {
      Point a = e.axis == 0 ? Point{s.lo, e.level} : Point{e.level, s.lo};
      Point b = e.axis == 0 ? Point{s.hi, e.level} : Point{e.level, s.hi};
      on_edge(e.density, a, b);
    }
  }
  if (point_in_polygon({rect.c1, rect.c2}, r, tol)) on_atom(Point{rect.c1, rect.c2});
}

}  // namespace

double mu_bar_of(const SupportRect& rect, const Polygon& region) {
  double total = 0.0;
  double inv = 1.0 / (rect.b1 * rect.b2);
  decompose_mu_bar(
      rect, region, [&](const Polygon& r) { total += -3.0 * inv * polygon_area(r); },
      [&](double density, Point a, Point b) {
        double len = std::hypot(b.x - a.x, b.y - a.y);
        total += density * len;
      },
      [&](Point) { total += 1.0; });
  return total;
}

double mu_bar_integral_affine(const SupportRect& rect, const Polygon& region, double ux,
                              double uy, double u0) {
  auto u = [&](Point z) { return ux * z.x + uy * z.y + u0; };
  double total = 0.0;
  double inv = 1.0 / (rect.b1 * rect.b2);
  decompose_mu_bar(
      rect, region,
      [&](const Polygon& r) { total += -3.0 * inv * polygon_area(r) * u(polygon_centroid(r)); },
      [&](double density, Point a, Point b) {
        double len = std::hypot(b.x - a.x, b.y - a.y);
        total += density * len * u({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
      },
      [&](Point z) { total += u(z); });
  return total;
}

double PiecewiseV::eval(double delta) const {
  if (knots.size() < 2) throw std::logic_error("PiecewiseV: empty");
  double lo = knots.front(), hi = knots.back();
  double tol = 1e-9 * (std::abs(lo) + std::abs(hi) + 1.0);
  if (delta < lo - tol || delta > hi + tol)
    throw std::domain_error("PiecewiseV::eval: delta outside domain");
  delta = std::clamp(delta, lo, hi);
  std::size_t i = std::upper_bound(knots.begin(), knots.end(), delta) - knots.begin();
  if (i > 0) --i;
  if (i >= coef.size()) i = coef.size() - 1;
  double t = delta - knots[i];
  return coef[i][0] + t * (coef[i][1] + t * coef[i][2]);
}

double PiecewiseV::max_discontinuity() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < coef.size(); ++i) {
    double w = knots[i + 1] - knots[i];
    double left = coef[i][0] + w * (coef[i][1] + w * coef[i][2]);
    worst = std::max(worst, std::abs(left - coef[i + 1][0]));
  }
  return worst;
}

double virtual_value_geometric(const SupportRect& rect, const Polygon& exclusion,
                               double delta) {
  double tol = 1e-9 * (rect.b1 + rect.b2);
  if (delta < -rect.b2 - tol || delta > rect.b1 + tol)
    throw std::domain_error("virtual_value_geometric: delta outside [-b2, b1]");
  double d = rect.c1 - rect.c2;
  // Keep {x - y >= delta + d}  <=>  {-x + y <= -(delta + d)}.
  double cc = -(delta + d);
  Polygon h = clip_halfplane(rect.polygon(), -1.0, 1.0, cc);
  double v = mu_bar_of(rect, h);
  if (!exclusion.empty()) v -= mu_bar_of(rect, clip_halfplane(exclusion, -1.0, 1.0, cc));
  return v;
}

PiecewiseV closed_form_V(const SupportRect& rect, const UnifiedParams& up) {
  const double b1 = rect.b1, b2 = rect.b2, c1 = rect.c1, c2 = rect.c2;
  const double d = c1 - c2;
  const double bprime = b1 - b2;
  const double d1 = up.delta1, d2 = up.delta2, ds = up.delta_star, h = up.h;

  // mu_bar of the unified exclusion quadrilateral.
  double zarea = 0.5 * (d1 * h + (ds + h) * d2);
  double mu_z = 1.0 - (3.0 * zarea + c2 * d1 + c1 * d2) / (b1 * b2);

  std::vector<double> raw = {-b2, -d2, ds, d1, bprime, b1};
  std::vector<double> knots;
  std::sort(raw.begin(), raw.end());
  double tol = 1e-13 * (b1 + b2);
  for (double k : raw) {
    k = std::clamp(k, -b2, b1);
    if (knots.empty() || k - knots.back() > tol) knots.push_back(k);
  }
  if (knots.front() > -b2 + tol) knots.insert(knots.begin(), -b2);
  if (knots.back() < b1 - tol) knots.push_back(b1);

  // V'(delta) * (b1*b2) as an affine function p0 + p1*delta on each piece.
  auto vprime_affine = [&](double mid, double& p0, double& p1) {
    if (mid < -d2) {
      p0 = 2.0 * b2 + d;
      p1 = 3.0;
    } else if (mid < ds) {
      double slope = (d2 + ds) > 0.0 ? 3.0 * (d2 - h) / (d2 + ds) : 0.0;
      p0 = (2.0 * b2 - c2 - 3.0 * d2) + slope * d2;
      p1 = slope;
    } else if (mid < d1) {
      double a1 = (d1 - ds) > 0.0 ? h / (d1 - ds) : 0.0;
      p0 = (2.0 * b2 - c2) - 3.0 * a1 * d1;
      p1 = 3.0 * a1;
    } else {
      p0 = 2.0 * b2;
      p1 = 0.0;
    }
    if (mid > bprime) {
      p0 += 2.0 * bprime - d;
      p1 += -3.0;
    }
  };

  PiecewiseV pv;
  pv.knots = knots;
  double inv = 1.0 / (b1 * b2);
  double value = -mu_z;  // V(-b2)
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double k0 = knots[i], k1 = knots[i + 1];
    double mid = 0.5 * (k0 + k1);
    double p0, p1;
    vprime_affine(mid, p0, p1);
    double b = (p0 + p1 * k0) * inv;   // V'(k0)
    double c = 0.5 * p1 * inv;         // half slope
    pv.coef.push_back({value, b, c});
    double w = k1 - k0;
    value += w * (b + w * c);
  }
  return pv;
}

PiecewiseV closed_form_V(StructureLabel label, const MechanismParams& params,
                         const SupportRect& rect) {
  return closed_form_V(rect, unify(label, params));
}

double virtual_value_closed_form(StructureLabel label, const MechanismParams& params,
                                 const SupportRect& rect, double delta) {
  return closed_form_V(label, params, rect).eval(delta);
}

PiecewiseV fit_V(const SupportRect& rect, const Polygon& exclusion,
                 const std::vector<double>& extra_knots) {
  const double b1 = rect.b1, b2 = rect.b2;
  const double d = rect.c1 - rect.c2;
  std::vector<double> raw = {-b2, 0.0, b1 - b2, b1};
  for (const Point& p : exclusion.v) raw.push_back((p.x - rect.c1) - (p.y - rect.c2));
  for (double k : extra_knots) raw.push_back(k);
  (void)d;
  std::sort(raw.begin(), raw.end());
  std::vector<double> knots;
  double tol = 1e-12 * (b1 + b2);
  for (double k : raw) {
    k = std::clamp(k, -b2, b1);
    if (knots.empty() || k - knots.back() > tol) knots.push_back(k);
  }
  if (knots.front() > -b2 + tol) knots.insert(knots.begin(), -b2);
  if (knots.back() < b1 - tol) knots.push_back(b1);

  PiecewiseV pv;
  pv.knots = knots;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    double k0 = knots[i], k1 = knots[i + 1], w = k1 - k0;
    double f0 = virtual_value_geometric(rect, exclusion, k0);
    double fm = virtual_value_geometric(rect, exclusion, 0.5 * (k0 + k1));
    double f1 = virtual_value_geometric(rect, exclusion, k1);
    double c = 2.0 * (f1 - 2.0 * fm + f0) / (w * w);
    double b = (f1 - f0 - c * w * w) / w;
    pv.coef.push_back({f0, b, c});
  }
  return pv;
}

double integral_V(const PiecewiseV& pv, double a, double b) {
  if (a > b) throw std::domain_error("integral_V: requires a <= b");
  double lo = pv.knots.front(), hi = pv.knots.back();
  double tol = 1e-9 * (std::abs(lo) + std::abs(hi) + 1.0);
  if (a < lo - tol || b > hi + tol) throw std::domain_error("integral_V: out of domain");
  a = std::clamp(a, lo, hi);
  b = std::clamp(b, lo, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pv.knots.size(); ++i) {
    double k0 = pv.knots[i], k1 = pv.knots[i + 1];
    double s = std::max(a, k0), e = std::min(b, k1);
    if (e <= s) continue;
    auto F = [&](double x) {
      double t = x - k0;
      return t * (pv.coef[i][0] + t * (pv.coef[i][1] / 2.0 + t * pv.coef[i][2] / 3.0));
    };
    total += F(e) - F(s);
  }
  return total;
}

double min_prefix_integral(const PiecewiseV& pv, double a, double b) {
  if (a > b) throw std::domain_error("min_prefix_integral: requires a <= b");
  double best = 0.0;  // prefix at x = a
  // Candidate x values: piece knots inside [a,b], b itself, and roots of V.
  std::vector<double> cand = {b};
  for (double k : pv.knots)
    if (k > a && k < b) cand.push_back(k);
  for (std::size_t i = 0; i + 1 < pv.knots.size(); ++i) {
    double k0 = pv.knots[i], k1 = pv.knots[i + 1];
    double A = pv.coef[i][2], B = pv.coef[i][1], C = pv.coef[i][0];
    auto add_root = [&](double t) {
      double x = k0 + t;
      if (x > a && x < b && t >= 0.0 && t <= k1 - k0) cand.push_back(x);
    };
    if (std::abs(A) > 1e-300) {
      double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        add_root((-B + sq) / (2.0 * A));
        add_root((-B - sq) / (2.0 * A));
      }
    } else if (std::abs(B) > 1e-300) {
      add_root(-C / B);
    }
  }
  for (double x : cand) best = std::min(best, integral_V(pv, a, x));
  return best;
}

double max_suffix_integral(const PiecewiseV& pv, double a, double b) {
  // max_x ∫_x^b V = ∫_a^b V - min_x ∫_a^x V.
  return integral_V(pv, a, b) - min_prefix_integral(pv, a, b);
}

}  // namespace menuforge
