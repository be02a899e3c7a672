#include "menuforge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace menuforge {

namespace {


double t_const() {
  static const double t = 3.0 * (37.0 + 3.0 * std::sqrt(465.0)) / 176.0;
  return t;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
              double fhi, double xtol) {
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (!((flo < 0.0) != (fhi < 0.0)))
    throw std::runtime_error("bisect: endpoints do not bracket a root");
  for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double xtol) {
  return bisect(f, lo, hi, f(lo), f(hi), xtol);
}

// Roots of f on [lo, hi] found by a sign scan with n panels.
std::vector<double> scan_roots(const std::function<double(double)>& f, double lo, double hi,
                               int n, double xtol) {
  std::vector<double> roots;
  double px = lo, pv = f(lo);
  for (int i = 1; i <= n; ++i) {
    double x = lo + (hi - lo) * i / n;
    double v = f(x);
    if (pv == 0.0)
      roots.push_back(px);
    else if ((pv < 0.0) != (v < 0.0))
      roots.push_back(bisect(f, px, x, pv, v, xtol));
    px = x;
    pv = v;
  }
  if (pv == 0.0) roots.push_back(px);
  return roots;
}

}  // namespace

// ---- defining equations (public, used in tests and sweeps) ---------------

double structure_b_residual(double c, double b1, double b2, double h, double ds) {
  (void)b1;
  double s = 1.5 * (h + ds) + c;
  return 27.0 * (c + h + ds) * (b2 + ds) * (b2 + ds) - 4.0 * (4.0 * b2 + 3.0 * ds) * s * s;
}

double structure_b_margin(double c, double b1, double b2, double h, double ds) {
  return -2.0 * b1 * b1 * b1 / 27.0 - b2 * ds * ds + b2 * ds * (b1 - b2 / 2.0) +
         (c + h) * h * h / 2.0;
}

double structure_c_residual(double c, double b1, double b2, double h, double ds) {
  double p = 1.5 * h + c;
  double q = 2.0 * b2 * ds + b2 * b2 / 2.0 - b1 * b2;
  return (2.0 * b1 * b1 * b1 / 27.0 + b2 * ds * ds - b2 * ds * (b1 - b2 / 2.0)) * p * p -
         (c + h) / 2.0 * q * q;
}

double structure_c_margin(double c, double b1, double b2, double h, double ds) {
  double u = b2 * b2 + 4.0 * b2 * ds;
  return (u - 3.0 * ds * h) * (u - 2.0 * c * ds - 3.0 * ds * h) -
         2.0 * b1 * b2 * (u - 2.0 * c * (ds + h) - 3.0 * h * (2.0 * ds + h));
}

// ---- thresholds ------------------------------------------------------------

double compute_beta(double b1, double b2) {
  // Largest real root >= b2 of A c^2 + B c + C = 0.
  double A = -(96.0 * b1 + 208.0 * b2);
  double B = -36.0 * b1 * b1 + 84.0 * b1 * b2 + 399.0 * b2 * b2;
  double C = 72.0 * b1 * b1 * b2 + 144.0 * b1 * b2 * b2 - 90.0 * b2 * b2 * b2;
  double disc = B * B - 4.0 * A * C;
  if (disc < 0.0) throw std::runtime_error("compute_beta: no real root");
  double r1 = (-B + std::sqrt(disc)) / (2.0 * A);
  double r2 = (-B - std::sqrt(disc)) / (2.0 * A);
  double lo = std::min(r1, r2), hi = std::max(r1, r2);
  return lo >= b2 ? lo : hi;
}

double d_to_e_threshold(double b1, double b2) {
  double den = 4.0 * (b1 * b1 * b1 - b2 * b2 * b2);
  if (den <= 0.0) return std::numeric_limits<double>::infinity();
  return 27.0 * b1 * b1 * b2 * b2 / den;
}

double dp_to_ep_threshold(double b1, double b2) {
  return 216.0 * b1 * b1 * b2 / (108.0 * b1 * b1 - 108.0 * b1 * b2 - 5.0 * b2 * b2);
}

// ---- structure solvers -----------------------------------------------------

namespace {

// Structure B inner solve: substitute delta*(h) from the first defining
// equation into the second; pick the physical branch (smallest root of the
// quintic inside (-b2/2, 3 b2/4); see tests for the branch validation).
struct BInner {
  double h, ds;
};

BInner solve_b_inner(double c, double b1, double b2) {
  auto ds_of = [&](double h) {
    return (b1 * b2 - b2 * b2 / 2.0 - 1.5 * h * h - c * h) / (2.0 * b2);
  };
  auto g = [&](double h) { return structure_b_residual(c, b1, b2, h, ds_of(h)); };
  auto roots = scan_roots(g, -0.5 * b2, 0.75 * b2, 600, 1e-15 * b2);
  if (roots.empty()) throw std::runtime_error("structure B: no root in branch window");
  double h = roots.front();
  return {h, ds_of(h)};
}

// Structure C inner solve: substitute the closed-form h(delta*) solving the
// B second equation into the C second equation; the physical branch is the
// smallest nonnegative delta* root.
struct CInner {
  double h, ds;
};

double c_h_of_ds(double c, double b2, double ds) {
  double den = 6.0 * (4.0 * b2 + 3.0 * ds);
  double num1 = 9.0 * b2 * b2 - 16.0 * b2 * c - 6.0 * ds * (b2 + 2.0 * c) - 9.0 * ds * ds;
  double under = 9.0 * b2 * b2 + 16.0 * b2 * c + 6.0 * ds * (3.0 * b2 + 2.0 * c) + 9.0 * ds * ds;
  return num1 / den + 3.0 * (b2 + ds) * std::sqrt(under) / den;
}

CInner solve_c_inner(double c, double b1, double b2) {
  auto g = [&](double ds) { return structure_c_residual(c, b1, b2, c_h_of_ds(c, b2, ds), ds); };
  auto roots = scan_roots(g, -0.05 * b2, 0.75 * b2, 800, 1e-15 * b2);
  double tol = 1e-7 * b2;
  for (double r : roots)
    if (r >= -tol) return {c_h_of_ds(c, b2, std::max(r, 0.0)), std::max(r, 0.0)};
  throw std::runtime_error("structure C: no nonnegative root");
}

}  // namespace

MechanismParams solve_structure_a(double c, double b1, double b2) {
  SupportRect rect(c, c, b1, b2);
  return solve_general_rect(rect).params;
}

MechanismParams solve_structure_b(double c, double b1, double b2) {
  BInner in = solve_b_inner(c, b1, b2);
  MechanismParams p;
  double d1 = in.h + in.ds;
  double d2 = (b1 * b2 - (1.5 * in.h + c) * d1) / (1.5 * d1 + c);
  p.delta1 = d1;
  p.delta2 = d2;
  p.delta_star = in.ds;
  p.h = in.h;
  p.a2 = d1 / (d2 + in.ds);
  return p;
}

MechanismParams solve_structure_c(double c, double b1, double b2) {
  CInner in = solve_c_inner(c, b1, b2);
  double p15 = 1.5 * in.h + c;
  double d1 = in.ds + (b1 * b2 - 2.0 * b2 * in.ds - b2 * b2 / 2.0) / p15;
  double d2 = (b1 * b2 - p15 * d1) / (1.5 * (in.h + in.ds) + c);
  MechanismParams p;
  p.delta1 = d1;
  p.delta2 = d2;
  p.delta_star = in.ds;
  p.h = in.h;
  p.a1 = in.h / (d1 - in.ds);
  p.a2 = (in.h + in.ds) / (d2 + in.ds);
  return p;
}

namespace {

MechanismParams solve_d_like(double c, double b1, double b2, bool prime) {
  auto d1_of = [&](double d2) { return (b1 * b2 - c * d2) / (c + 1.5 * d2); };
  auto g = [&](double d2) {
    double d1 = d1_of(d2);
    double base = 0.5 * d1 * d2 * (d2 - d1) + (c / 2.0) * (d2 * d2 - d1 * d1);
    if (prime)
      return -2.0 / 27.0 * b2 * b2 * b2 + base +
             (1.0 / 16.0) * b2 * (2.0 * b1 - b2) * (2.0 * b1 - b2);
    return 2.0 / 27.0 * (b1 * b1 * b1 - b2 * b2 * b2) + base;
  };
  double lo = 1e-14 * b2, hi = b2 / 3.0;
  double flo = g(lo), fhi = g(hi);
  double d2;
  if ((flo < 0.0) != (fhi < 0.0)) {
    d2 = bisect(g, lo, hi, flo, fhi, 1e-15 * b2);
  } else {
    auto roots = scan_roots(g, lo, hi, 400, 1e-15 * b2);
    if (roots.empty()) throw std::runtime_error("structure D: no root for delta2");
    d2 = roots.front();
  }
  double d1 = d1_of(d2);
  MechanismParams p;
  p.delta1 = d1;
  p.delta2 = d2;
  p.delta_star = d1;
  p.h = 0.0;
  p.a = d1 / (d1 + d2);
  return p;
}

MechanismParams solve_e_like(double c, double b1, double b2) {
  double L = b1 * b2 / c;
  MechanismParams p;
  p.delta1 = L;
  p.delta2 = 0.0;
  p.delta_star = L;
  p.h = 0.0;
  return p;
}

}  // namespace

MechanismParams solve_structure_d(double c, double b1, double b2) {
  return solve_d_like(c, b1, b2, false);
}
MechanismParams solve_structure_dp(double c, double b1, double b2) {
  return solve_d_like(c, b1, b2, true);
}
MechanismParams solve_structure_e(double c, double b1, double b2) {
  return solve_e_like(c, b1, b2);
}
MechanismParams solve_structure_ep(double c, double b1, double b2) {
  return solve_e_like(c, b1, b2);
}

// ---- threshold curves needing the inner solves ----------------------------

double compute_alpha1(double b1, double b2) {
  if (b1 <= b2 * (1.0 + 1e-12)) return b2;
  double hi = 2.0 * (t_const() - 1.0) * (b1 - b2) + b2;
  auto margin = [&](double c) {
    BInner in = solve_b_inner(c, b1, b2);
    return structure_b_margin(c, b1, b2, in.h, in.ds);
  };
  double lo = b2 * (1.0 + 1e-9);
  double flo = margin(lo), fhi = margin(hi);
  if (fhi >= 0.0) return hi;  // boundary case b1 == 1.5*b2
  if (flo <= 0.0) return lo;
  return bisect(margin, lo, hi, flo, fhi, 1e-13 * b2);
}

double compute_alpha2(double b1, double b2) {
  double lo = 2.0 * (t_const() - 1.36) * (b1 - b2) + 1.36 * b2;
  double hi = 2.0 * (t_const() - 1.40) * (b1 - b2) + 1.40 * b2;
  auto margin = [&](double c) {
    CInner in = solve_c_inner(c, b1, b2);
    return structure_c_margin(c, b1, b2, in.h, in.ds);
  };
  double flo = margin(lo), fhi = margin(hi);
  if (flo <= 0.0) {
    // widen downward (should not trigger inside the documented bracket)
    lo = b2 * (1.0 + 1e-9);
    flo = margin(lo);
    if (flo <= 0.0) return lo;
  }
  if (fhi >= 0.0) return hi;
  return bisect(margin, lo, hi, flo, fhi, 1e-13 * b2);
}

// ---- classification --------------------------------------------------------

Regime classify_regime(double c, double b1, double b2) {
  if (!(b1 > 0.0) || !(b2 > 0.0)) throw std::domain_error("classify_regime: sides must be positive");
  if (b1 < b2) throw std::domain_error("classify_regime: requires b1 >= b2");
  if (c < 0.0) throw std::domain_error("classify_regime: c must be nonnegative");
  Regime r;
  if (b1 >= 1.5 * b2) {
    double beta = compute_beta(b1, b2);
    double ee = dp_to_ep_threshold(b1, b2);
    r.thresholds = {{"a_to_b", b2}, {"beta", beta}, {"dp_to_ep", ee}};
    if (c <= b2)
      r.label = StructureLabel::A;
    else if (c <= beta)
      r.label = StructureLabel::B;
    else if (c <= ee)
      r.label = StructureLabel::Dp;
    else
      r.label = StructureLabel::Ep;
  } else {
    double a1 = compute_alpha1(b1, b2);
    double a2 = compute_alpha2(b1, b2);
    double ee = d_to_e_threshold(b1, b2);
    r.thresholds = {{"a_to_b", b2}, {"alpha1", a1}, {"alpha2", a2}, {"d_to_e", ee}};
    if (c <= b2)
      r.label = StructureLabel::A;
    else if (c <= a1)
      r.label = StructureLabel::B;
    else if (c <= a2)
      r.label = StructureLabel::C;
    else if (c <= ee)
      r.label = StructureLabel::D;
    else
      r.label = StructureLabel::E;
  }
  return r;
}

// ---- general rectangle (structure-A-shaped) --------------------------------

SolveResult solve_general_rect(const SupportRect& rect) {
  double c1 = rect.c1, c2 = rect.c2, b1 = rect.b1, b2 = rect.b2;
  if (b1 < b2) throw std::domain_error("solve_general_rect: requires b1 >= b2");
  if (c2 < 0.0 || c1 < c2 || 2.0 * c1 - c2 > b2 + 1e-12)
    throw std::domain_error("solve_general_rect: unsupported regime (needs c2>=0, c1>=c2, 2c1-c2<=b2)");
  double d = c1 - c2;
  auto d1_of = [&](double d2) { return (b1 * b2 - c1 * d2) / (3.0 * d2 + c2); };
  auto g = [&](double d2) {
    double d1 = d1_of(d2);
    return -1.5 * d2 * d2 + 2.0 * b2 * d2 - b2 * b2 / 2.0 - d * (b2 - d2) +
           (c2 - 2.0 * b2 + 3.0 * d2) * d1;
  };
  double lo = (b2 + 2.0 * d) / 3.0, hi = (2.0 * b2 - c2) / 3.0;
  double d2;
  if (hi - lo <= 1e-13 * b2) {
    d2 = 0.5 * (lo + hi);
  } else {
    double flo = g(lo), fhi = g(hi);
    if ((flo < 0.0) != (fhi < 0.0)) {
      d2 = bisect(g, lo, hi, flo, fhi, 1e-15 * b2);
    } else if (std::abs(flo) <= std::abs(fhi)) {
      d2 = lo;
    } else {
      d2 = hi;
    }
  }
  double d1 = d1_of(d2);
  SolveResult out;
  out.rect = rect;
  out.regime.label = StructureLabel::A;
  out.regime.thresholds = {{"a_to_b", b2}};
  out.params.delta1 = d1;
  out.params.delta2 = d2;
  out.params.delta_star = d1 - d2;
  out.params.h = d2;
  return out;
}

// ---- main entry -------------------------------------------------------------

SolveResult solve(double c, double b1, double b2) {
  if (!(b1 > 0.0) || !(b2 > 0.0)) throw std::domain_error("solve: sides must be positive");
  if (c < 0.0) throw std::domain_error("solve: c must be nonnegative");
  bool swapped = false;
  if (b1 < b2) {
    std::swap(b1, b2);
    swapped = true;
  }
  // Normalize scale to b2 = 1 (scaling covariance), then rescale.
  double s = b2;
  double cn = c / s, b1n = b1 / s;
  Regime regime = classify_regime(cn, b1n, 1.0);
  MechanismParams p;
  switch (regime.label) {
    case StructureLabel::A: p = solve_structure_a(cn, b1n, 1.0); break;
    case StructureLabel::B: p = solve_structure_b(cn, b1n, 1.0); break;
    case StructureLabel::C: p = solve_structure_c(cn, b1n, 1.0); break;
    case StructureLabel::D: p = solve_structure_d(cn, b1n, 1.0); break;
    case StructureLabel::Dp: p = solve_structure_dp(cn, b1n, 1.0); break;
    case StructureLabel::E: p = solve_structure_e(cn, b1n, 1.0); break;
    case StructureLabel::Ep: p = solve_structure_ep(cn, b1n, 1.0); break;
  }
  auto rescale = [&](std::optional<double>& v) {
    if (v) v = *v * s;
  };
  rescale(p.delta1);
  rescale(p.delta2);
  rescale(p.delta_star);
  rescale(p.h);
  for (auto& [k, v] : regime.thresholds) v *= s;
  SolveResult out;
  out.rect = SupportRect(c, c, b1, b2);
  out.regime = regime;
  out.params = p;
  out.swapped = swapped;
  return out;
}

// ---- unified parameter mapping ----------------------------------------------

UnifiedParams unify(StructureLabel label, const MechanismParams& p) {
  auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) throw std::domain_error(std::string("missing parameter: ") + name);
    return *v;
  };
  UnifiedParams u;
  switch (label) {
    case StructureLabel::A: {
      u.delta1 = need(p.delta1, "delta1");
      u.delta2 = need(p.delta2, "delta2");
      u.delta_star = u.delta1 - u.delta2;
      u.h = u.delta2;
      break;
    }
    case StructureLabel::B: {
      u.delta1 = need(p.delta1, "delta1");
      u.delta2 = need(p.delta2, "delta2");
      u.h = need(p.h, "h");
      u.delta_star = u.delta1 - u.h;
      break;
    }
    case StructureLabel::C: {
      u.delta1 = need(p.delta1, "delta1");
      u.delta2 = need(p.delta2, "delta2");
      u.h = need(p.h, "h");
      u.delta_star = need(p.delta_star, "delta_star");
      break;
    }
    case StructureLabel::D:
    case StructureLabel::Dp: {
      u.delta1 = need(p.delta1, "delta1");
      u.delta2 = need(p.delta2, "delta2");
      u.delta_star = u.delta1;
      u.h = 0.0;
      break;
    }
    case StructureLabel::E:
    case StructureLabel::Ep: {
      u.delta1 = need(p.delta1, "delta1");
      u.delta2 = 0.0;
      u.delta_star = u.delta1;
      u.h = 0.0;
      break;
    }
  }
  return u;
}

}  // namespace menuforge
