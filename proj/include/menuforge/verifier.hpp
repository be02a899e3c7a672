#pragma once
// Certification of a solved mechanism: interval-by-interval optimality
// conditions on the virtual value V, exclusion-region mass balance, and
// numeric grid sweeps re-verifying the closed-form inequality claims that
// underpin the structure classification.

#include <array>
#include <string>
#include <vector>

#include "menuforge/mechanism.hpp"

namespace menuforge {

struct IntervalReport {
  double lo = 0.0, hi = 0.0;  // delta interval
  double q1 = 0.0;            // constant allocation level on the interval
  int condition_set = 0;      // 2 (q1=0), 3 (interior), or 4 (q1=1)
  std::vector<std::pair<std::string, double>> margins;  // check name -> margin
  bool pass = false;
};

struct MyersonReport {
  std::vector<IntervalReport> intervals;
  double worst_margin = 0.0;
  std::string worst_check;
  bool pass = false;
};

// Checks the interval conditions on V for the mechanism's allocation steps.
// All quantities are rescaled to b2 = 1 first, so margins are comparable
// across scales; pass iff every margin >= -tol.
MyersonReport verify_myerson(const Mechanism& mech, double tol = 1e-7);

// mu_bar mass of the exclusion region (0 for a certified mechanism).
double verify_exclusion_balance(const Mechanism& mech);
// Same mass after growing the exclusion region by the given factor about its
// centroid; strictly negative for a certified mechanism when factor > 1.
double grown_exclusion_mass(const Mechanism& mech, double factor = 1.01);

std::string report_to_json(const MyersonReport& report);

struct SweepReport {
  std::string check_id;
  std::string grid;  // human-readable description of the sampled region
  double worst_margin = 0.0;
  std::array<double, 3> worst_point{};          // c, b1, b2 (b2 = 1 units)
  std::vector<std::array<double, 4>> rows;      // c, b1, b2, margin
  bool pass = false;
};

// Numeric re-verification of one closed-form inequality claim over its
// stated region, sampled on grid_n x grid_n points (b2 normalized to 1).
// Unknown check_id or grid_n < 2 is a domain error. workers <= 0 means
// hardware concurrency; the result is independent of the worker count.
SweepReport certify_sweep(const std::string& check_id, int grid_n = 50,
                          int workers = 0, double tol = 1e-9);

// All known check ids, in canonical order.
const std::vector<std::string>& certify_check_ids();

std::string sweep_to_csv(const SweepReport& report);
std::string sweep_to_json(const SweepReport& report);

}  // namespace menuforge
