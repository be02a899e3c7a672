#pragma once
// Dual optimality certificates for the three worked support rectangles:
// 1-D boundary measures ("shuffling" corrections), mass-transport plans
// whose marginal difference reproduces mu_bar plus the corrections, convex
// dominance tests, transport cost, and complementary-slackness checks.
//
// All three certificates move mass along 45-degree lines z1 - z2 = const
// ("fibers"), except example 3 which adds horizontal transfers at fixed z2.
// The fiber is indexed by delta = (z1-c1) - (z2-c2) and parameterized by
// w = z2 - c2; all 1-D densities below are per unit delta (respectively per
// unit z2 for horizontal transfers), which makes the per-fiber balance
//   source density = 3/(b1 b2) * received length + boundary atoms
// exact for a valid plan.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "menuforge/domain.hpp"
#include "menuforge/mechanism.hpp"

namespace menuforge {

// Signed 1-D measure on a segment: piecewise-linear density in a scalar
// parameter p (affine map p in [p_lo, p_hi] -> [start, end]) plus optional
// atoms. Gaps between pieces mean zero density.
struct DensityPiece {
  double p_lo = 0.0;
  double p_hi = 0.0;
  double f_lo = 0.0;  // density at p_lo
  double f_hi = 0.0;  // density at p_hi
};

struct SegmentMeasure {
  std::string name;
  Point start, end;  // points at p_lo and p_hi
  double p_lo = 0.0;
  double p_hi = 1.0;
  std::vector<DensityPiece> pieces;
  std::vector<std::pair<double, double>> atoms;  // (p, mass)

  Point point_at(double p) const;
  double density(double p) const;  // atoms excluded
  double mass() const;
  // First moment about the left end: integral of (p - p_lo) dm.
  double first_moment() const;
  // Integral of max(p - k, 0) dm.
  double hinge_integral(double k) const;
};

// Convex dominance of the zero measure on the segment: total mass zero,
// nonnegative first moment, and nonnegative hinge integrals (hinge functions
// plus constants generate the increasing-convex cone; mass zero kills the
// constants). The hinge grid spans [p_lo, p_hi].
struct DominanceReport {
  double total_mass = 0.0;
  double first_moment = 0.0;
  double min_hinge = 0.0;
  double min_hinge_at = 0.0;
  bool pass = false;
};
DominanceReport check_convex_dominance(const SegmentMeasure& m, int grid = 500,
                                       double tol = 1e-9);

// Sum of measures living on the same segment with a common parameter.
SegmentMeasure combine_measures(const std::string& name,
                                const std::vector<SegmentMeasure>& ms);

// One 45-degree transfer on the fiber with offset difference delta: mass
// source_density (per unit delta) moves from `source` to an interval of the
// fiber carrying area density 3/(b1 b2) per unit w plus point sinks (edge
// densities of mu_bar, or the negative part of the anti-diagonal measure).
// w coordinates are offsets z2 - c2.
struct FiberTransfer {
  Point source;
  double source_density = 0.0;
  double area_lo = 0.0;  // receiving interval [area_lo, area_hi] in w
  double area_hi = 0.0;
  std::vector<std::pair<double, double>> atom_sinks;  // (w, mass per unit delta)
};

// Horizontal transfer at height z2 = c2 + v (example 3 only): mass moves
// from the right edge to the interval [y1_lo, y1_hi] x {z2} with area
// density 3/(b1 b2) per unit z1.
struct HorizontalTransfer {
  Point source;
  double source_density = 0.0;
  double y1_lo = 0.0;  // absolute z1 coordinates
  double y1_hi = 0.0;
};

struct TransportPlan {
  int example = 0;
  Mechanism mech;
  std::vector<SegmentMeasure> shuffles;
  // Convex dominance holds per group of shuffles sharing a segment (example
  // 3's oblique and horizontal corrections only dominate zero jointly).
  std::vector<std::vector<int>> dominance_groups;
  // Quadrature breakpoints of the fiber index delta (45-degree family) and
  // of the height v (horizontal family; empty unless example 3).
  std::vector<double> delta_breaks;
  std::vector<double> horizontal_breaks;
  // Test hook: shifts every 45-degree target by this amount in z1, which
  // breaks the infinity-norm pairing. Zero for a genuine certificate.
  double perturb_offset = 0.0;

  // Example 2 internals: auxiliary exclusion quadrilateral of the shuffle
  // parameters (offsets from the corner) and anti-diagonal density data.
  Polygon aux_quad;          // offset coordinates; empty unless example 2
  double shuffle_delta = 0;  // example 2: delta1 = delta2 of the correction
  double shuffle_a = 0;      // example 2: its allocation weight
};

// The certificate for support square/rectangle n = 1, 2, 3:
//   1: Unif[1.26, 2.26]^2   2: Unif[1.5, 2.5]^2   3: Unif[0,1.2] x [0,1].
TransportPlan build_example(int n);

// Transfers active on the fiber with offset difference delta (one entry for
// the boundary source; example 2 adds one for the anti-diagonal source where
// its density is positive). Empty when delta is outside (-b2, b1).
std::vector<FiberTransfer> fiber_transfers(const TransportPlan& plan, double delta);

// Horizontal transfer at offset height v; returns false if none.
bool horizontal_transfer(const TransportPlan& plan, double v, HorizontalTransfer* out);

// Transport cost: integral of ||z - z'||_inf against the plan. 45-degree
// transfers contribute the common coordinate displacement, horizontal
// transfers |z1 - z1'|, and the identity part on the exclusion region zero.
double dual_cost(const TransportPlan& plan);

// Marginal identity gamma1 - gamma2 = mu_bar + shuffling sum on the support
// minus the exclusion region: per-transfer conservation on a dense fiber
// grid, plus the same identity integrated over random sub-segments of the
// measure supports (boundary edges and the anti-diagonal line).
struct MarginalReport {
  double worst_fiber_residual = 0.0;
  double worst_segment_residual = 0.0;
  bool pass = false;
};
MarginalReport check_marginals(const TransportPlan& plan, int n_segments = 100,
                               std::uint64_t seed = 1);

// Complementary slackness: u(z) - u(z') = ||z - z'||_inf on sampled
// (source, target) pairs from the kernel support, and the pairing identity
// integral of u d(gamma1 - gamma2) = integral of u d(mu_bar).
struct SlacknessReport {
  double max_kernel_violation = 0.0;
  double pairing_gap = 0.0;
  bool pass = false;
};
SlacknessReport check_complementary_slackness(const Mechanism& mech,
                                              const TransportPlan& plan,
                                              int samples = 10000,
                                              std::uint64_t seed = 1);

// Strong duality: primal expected revenue versus transport cost.
struct DualityReport {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool pass = false;
};
DualityReport strong_duality(const TransportPlan& plan, double tol = 1e-4);

// Density samples of every shuffling measure as CSV
// (measure,p,z1,z2,density) for plotting.
std::string density_csv(const TransportPlan& plan, int samples_per_piece = 64);

}  // namespace menuforge
