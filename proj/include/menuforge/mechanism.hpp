#pragma once
// Builds the optimal menu from solved structure parameters, together with
// its exclusion region and best-response partition of the support rectangle,
// and evaluates revenue two independent ways.

#include <string>
#include <utility>
#include <vector>

#include "menuforge/domain.hpp"
#include "menuforge/measure.hpp"
#include "menuforge/solver.hpp"

namespace menuforge {

struct Mechanism {
  SupportRect rect;
  Regime regime;
  MechanismParams params;
  Menu menu;
  Polygon exclusion;  // may be a degenerate segment (structures E / Ep)
  std::vector<std::pair<int, Polygon>> partition;  // (menu item index, cell)
  bool swapped = false;  // items were exchanged (b1 < b2 input)
};

// Menu construction. Prices are chosen so that the induced best-response
// boundaries land exactly on the allocation-jump locations required by the
// optimality conditions (jumps only where the virtual value vanishes).
Menu menu_of(StructureLabel label, const MechanismParams& params, const SupportRect& rect);

// Full mechanism from a solver result (handles the swapped orientation).
Mechanism make_mechanism(const SolveResult& s);

// Index into mech.menu.items of the buyer's utility-maximizing item at z.
// Ties resolve toward higher q1, then higher price.
int best_response(const Mechanism& mech, Point z);

// Expected revenue: sum over items of price times cell probability.
double revenue(const Mechanism& mech);
// The same quantity via the measure identity  revenue = ∫ u d(mu_bar).
double revenue_via_measure(const Mechanism& mech);

// Buyer behavior along the 45-degree line with offset difference delta:
// u1 is the envelope value q1*(d+delta) - price of the best non-null item
// (so that utility at z equals z2 + u1), q1 its allocation (right-continuous
// step), and z2_star = -u1 the absolute z2 where utility crosses zero.
struct UtilityPoint {
  double u1;
  double q1;
  double z2_star;
};
UtilityPoint utility_profile(const Mechanism& mech, double delta);

// Offsets delta at which q1(delta) jumps, in increasing order.
std::vector<double> allocation_breakpoints(const Mechanism& mech);

// JSON serialization ("schema_version": 1) and its inverse.
std::string to_json(const Mechanism& mech, double revenue_value);
Mechanism mechanism_from_json(const std::string& text);

}  // namespace menuforge
