#pragma once
// Closed-form / bracketed-bisection solver for the optimal-mechanism
// parameters on a uniform rectangle. Seven qualitative structures
// (A, B, C, D, Dp, E, Ep) cover the (c, b1, b2) parameter space; the
// classifier picks the structure from threshold curves and each
// solve_structure_* routine pins the parameters by one-dimensional
// bisection along an explicit curve of the first defining equation.

#include <map>
#include <string>

#include "menuforge/domain.hpp"
#include "menuforge/params.hpp"

namespace menuforge {

struct Regime {
  StructureLabel label = StructureLabel::A;
  std::map<std::string, double> thresholds;  // threshold values in absolute units
};

struct SolveResult {
  SupportRect rect;        // as passed by the caller
  Regime regime;           // classification (for the canonical orientation)
  MechanismParams params;  // solved parameters (canonical orientation)
  bool swapped = false;    // true if items were exchanged to get b1 >= b2
};

// Threshold curves (all in absolute units; homogeneous of degree 1 in scale).
double compute_beta(double b1, double b2);      // B -> Dp boundary, b1 >= 1.5*b2
double compute_alpha1(double b1, double b2);    // B -> C boundary, b2 <= b1 <= 1.5*b2
double compute_alpha2(double b1, double b2);    // C -> D boundary, b2 <= b1 <= 1.5*b2
double d_to_e_threshold(double b1, double b2);  // 27 b1^2 b2^2 / (4 (b1^3 - b2^3))
double dp_to_ep_threshold(double b1, double b2);

// Structure classification for a symmetric support with corner c and sides
// b1 >= b2. Ties belong to the lower-c structure.
Regime classify_regime(double c, double b1, double b2);

// Per-structure parameter solvers (c, b1, b2 with b1 >= b2; symmetric case).
MechanismParams solve_structure_a(double c, double b1, double b2);
MechanismParams solve_structure_b(double c, double b1, double b2);
MechanismParams solve_structure_c(double c, double b1, double b2);
MechanismParams solve_structure_d(double c, double b1, double b2);
MechanismParams solve_structure_dp(double c, double b1, double b2);
MechanismParams solve_structure_e(double c, double b1, double b2);
MechanismParams solve_structure_ep(double c, double b1, double b2);

// Asymmetric rectangle (structure-A-shaped mechanisms). Preconditions:
// b1 >= b2, c2 >= 0, c1 >= c2, 2*c1 - c2 <= b2; otherwise a domain error
// ("unsupported regime").
SolveResult solve_general_rect(const SupportRect& rect);

// Main entry point: symmetric support [c, c+b1] x [c, c+b2]. If b1 < b2 the
// items are exchanged internally and the result is flagged as swapped.
SolveResult solve(double c, double b1, double b2);

// Defining-equation residuals (zero at solutions) and validity margins
// (nonnegative where the structure applies), used by tests and sweeps.
double structure_b_residual(double c, double b1, double b2, double h, double delta_star);
double structure_b_margin(double c, double b1, double b2, double h, double delta_star);
double structure_c_residual(double c, double b1, double b2, double h, double delta_star);
double structure_c_margin(double c, double b1, double b2, double h, double delta_star);

}  // namespace menuforge
