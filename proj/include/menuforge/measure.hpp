#pragma once
// The signed measure mu_bar associated with the uniform distribution on a
// rectangle, and the virtual value function V built from it.
//
// mu_bar has area density -3/(b1*b2) on the rectangle interior, line
// densities (each times 1/(b1*b2)) of -c2 on the bottom edge, -c1 on the
// left edge, +(c2+b2) on the top edge, +(c1+b1) on the right edge, and a
// unit point mass at the corner (c1,c2). Its total mass over the rectangle
// is zero.
//
// V(delta) is the mu_bar measure of { z : (z1-c1)-(z2-c2) >= delta } minus
// the exclusion region. It is continuous and piecewise quadratic in delta.

#include <array>
#include <vector>

#include "menuforge/domain.hpp"
#include "menuforge/params.hpp"

namespace menuforge {

// mu_bar measure of a convex region (proper polygon, degenerate segment, or
// point). Boundary overlaps are counted once; the corner atom counts when it
// lies in the closed region.
double mu_bar_of(const SupportRect& rect, const Polygon& region);

// Integral of an affine function u over the measure mu_bar restricted to a
// convex region; used for the revenue identity  revenue = ∫ u d(mu_bar).
// u(z) = ux*z.x + uy*z.y + u0.
double mu_bar_integral_affine(const SupportRect& rect, const Polygon& region,
                              double ux, double uy, double u0);

// Piecewise quadratic function of delta on [-b2, b1]: on piece i,
// V(delta) = a + b*(delta-k_i) + c*(delta-k_i)^2 with k_i = knots[i].
struct PiecewiseV {
  std::vector<double> knots;                    // size n+1, increasing
  std::vector<std::array<double, 3>> coef;      // size n: {a, b, c} per piece

  double domain_lo() const { return knots.front(); }
  double domain_hi() const { return knots.back(); }
  double eval(double delta) const;
  // Largest jump between adjacent piece values at an interior knot.
  double max_discontinuity() const;
};

// V evaluated geometrically by polygon clipping. delta is the offset
// difference (z1-c1)-(z2-c2); values outside [-b2, b1] are a domain error.
double virtual_value_geometric(const SupportRect& rect, const Polygon& exclusion,
                               double delta);

// Closed-form V from the unified exclusion parameters. Exact piecewise
// quadratic with knots at {-b2, -delta2, delta_star, delta1, b1-b2, b1}.
PiecewiseV closed_form_V(const SupportRect& rect, const UnifiedParams& up);

// Convenience wrapper taking structure-specific parameters.
PiecewiseV closed_form_V(StructureLabel label, const MechanismParams& params,
                         const SupportRect& rect);
double virtual_value_closed_form(StructureLabel label, const MechanismParams& params,
                                 const SupportRect& rect, double delta);

// Piecewise-quadratic reconstruction of V for an arbitrary convex exclusion
// region, interpolating virtual_value_geometric at three points per piece
// (exact because V is quadratic between breakpoints). extra_knots may add
// breakpoints (e.g. menu-induced ones).
PiecewiseV fit_V(const SupportRect& rect, const Polygon& exclusion,
                 const std::vector<double>& extra_knots = {});

// Exact integral of V over [a, b]; requires a <= b (domain error otherwise)
// and [a,b] inside the knot span.
double integral_V(const PiecewiseV& pv, double a, double b);

// Minimum of x -> integral_V(pv, a, x) for x in [a, b], found exactly from
// piece endpoints and interior roots of V (extrema of the prefix integral).
double min_prefix_integral(const PiecewiseV& pv, double a, double b);
// Maximum of x -> integral_V(pv, x, b) for x in [a, b].
double max_suffix_integral(const PiecewiseV& pv, double a, double b);

}  // namespace menuforge
