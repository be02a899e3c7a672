#pragma once
// Independent brute-force lower bound on optimal revenue: exhaustive search
// over menus of lottery items (a, 1-a, t) with a and the induced buying
// thresholds on discrete grids. The search is exact for the searched space:
// revenue decomposes along 45-degree lines into per-item integrals that are
// piecewise linear in the threshold, so a layered longest-path pass over
// (item, item) transitions enumerates every threshold-ordered menu.

#include <string>
#include <utility>
#include <vector>

#include "menuforge/domain.hpp"
#include "menuforge/mechanism.hpp"

namespace menuforge {

struct OracleConfig {
  double allocation_grid = 0.05;  // step for a in [0, 1]
  double price_grid = 0.02;       // step for t in [c2, c1+b1]
  int max_items = 4;              // non-null items
  bool unrestricted = false;      // skeptic mode: free (q1, q2) items
  long long budget = 60'000'000;  // transition / menu evaluation budget
  long long mc_samples = 200'000; // used by the Monte Carlo cross-check
  unsigned seed = 1;
  int workers = 0;                // <= 0 means hardware concurrency

  void validate() const;
};

struct OracleResult {
  Menu best;
  double revenue = 0.0;
  bool partial = false;  // search was truncated by the budget
  std::vector<std::pair<Menu, double>> top;  // best menus, descending revenue
};

// Exhaustive search; symmetric rect required. Deterministic given config.
OracleResult oracle_search(const SupportRect& rect, const OracleConfig& config,
                           int top_k = 1);

// Exact expected revenue of an arbitrary menu via best-response polygons.
double evaluate_menu(const SupportRect& rect, const Menu& menu);
// Monte Carlo estimate of the same quantity (cross-validation only).
double evaluate_menu_mc(const SupportRect& rect, const Menu& menu, long long n,
                        unsigned seed);

// Revenue resolution of the grid: 2 * (price_grid + allocation_grid*(b1+b2)).
double oracle_epsilon(const SupportRect& rect, const OracleConfig& config);

// revenue(mech) - oracle best; >= -oracle_epsilon for a correct solver.
double compare(const Mechanism& mech, const OracleConfig& config);

// CSV of the top menus: items flattened as q1:q2:price triples.
std::string oracle_top_csv(const OracleResult& result);

}  // namespace menuforge
