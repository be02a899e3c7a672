#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "menuforge/oracle.hpp"
#include "menuforge/solver.hpp"

using namespace menuforge;

TEST_CASE("free rectangle lower bound brackets the known optimum") {
  // Optimal revenue for the unit square at c=0 is 2/(3*sqrt(3)) ~ 0.3849;
  // the default grids must land within [0.375, 0.385].
  OracleConfig cfg;
  OracleResult res = oracle_search(SupportRect(0, 0, 1, 1), cfg);
  CHECK(!res.partial);
  CHECK(res.revenue >= 0.375);
  CHECK(res.revenue <= 0.385);
}

TEST_CASE("oracle rediscovers the half-half lottery at c=1.5") {
  OracleConfig cfg;
  OracleResult res = oracle_search(SupportRect(1.5, 1.5, 1, 1), cfg);
  bool found = false;
  for (size_t i = 1; i < res.best.items.size(); ++i) {
    const MenuItem& it = res.best.items[i];
    if (std::abs(it.q1 - 0.5) < 1e-9 && std::abs(it.price - 1.6455) <= cfg.price_grid)
      found = true;
  }
  CHECK(found);
}

TEST_CASE("single-item menus are strictly worse on the free square") {
  OracleConfig one;
  one.max_items = 1;
  OracleConfig four;
  double r1 = oracle_search(SupportRect(0, 0, 1, 1), one).revenue;
  double r4 = oracle_search(SupportRect(0, 0, 1, 1), four).revenue;
  CHECK(r1 < r4 - 1e-3);
  // Best single item is a half-half lottery: max_t t*(1 - 2t^2) = 0.2722.
  CHECK(r1 == doctest::Approx(std::sqrt(1.0 / 6.0) * 2.0 / 3.0).epsilon(2e-2));
}

TEST_CASE("refinement and max_items monotonicity") {
  SupportRect rect(1.5, 1.5, 1, 1);
  OracleConfig coarse;
  coarse.allocation_grid = 0.1;
  coarse.price_grid = 0.04;
  OracleConfig fine;
  double rc = oracle_search(rect, coarse).revenue;
  double rf = oracle_search(rect, fine).revenue;
  CHECK(rf >= rc - 1e-12);
  OracleConfig two = fine;
  two.max_items = 2;
  CHECK(oracle_search(rect, two).revenue <= rf + 1e-12);
}

TEST_CASE("analytic mechanism beats the oracle within grid resolution") {
  const double pts[][3] = {{0.5, 1, 1}, {1.26, 1, 1}, {1.5, 1, 1},
                           {2, 2, 1},   {7, 1.5, 1},  {10, 2, 1}};
  OracleConfig cfg;
  for (const auto& p : pts) {
    Mechanism mech = make_mechanism(solve(p[0], p[1], p[2]));
    double margin = compare(mech, cfg);
    CAPTURE(p[0]);
    CAPTURE(p[1]);
    CHECK(margin >= -oracle_epsilon(mech.rect, cfg));
    CHECK(margin <= revenue(mech) * 0.01);  // oracle within 1% of analytic
    CHECK(margin >= -1e-9);                 // oracle never beats the solver
  }
}

TEST_CASE("oracle evaluation path reproduces the analytic revenue") {
  Mechanism mech = make_mechanism(solve(1.26, 1, 1));
  CHECK(evaluate_menu(mech.rect, mech.menu) ==
        doctest::Approx(revenue(mech)).epsilon(1e-10));
}

TEST_CASE("best oracle menu induces a nondecreasing allocation step") {
  OracleResult res = oracle_search(SupportRect(1.5, 1.5, 1, 1), OracleConfig{});
  auto q1_at = [&](double delta) {
    double best = 0.0, q = 0.0;
    for (size_t i = 1; i < res.best.items.size(); ++i) {
      const MenuItem& it = res.best.items[i];
      double e = it.q1 * delta - it.price;
      if (e > best || (e == best && it.q1 > q)) {
        best = e;
        q = it.q1;
      }
    }
    return q;
  };
  double prev = -1.0;
  for (int i = 0; i <= 200; ++i) {
    double q = q1_at(-1.0 + 2.0 * i / 200.0);
    CHECK(q >= prev - 1e-12);
    prev = q;
  }
}

TEST_CASE("monte carlo cross-validates the polygon evaluation") {
  Mechanism mech = make_mechanism(solve(1.3, 1.2, 1.0));
  double exact = evaluate_menu(mech.rect, mech.menu);
  double mc = evaluate_menu_mc(mech.rect, mech.menu, 400000, 123);
  CHECK(std::abs(mc - exact) < 0.01);
}

TEST_CASE("skeptic mode with free allocations does not beat the solver") {
  Mechanism mech = make_mechanism(solve(1.5, 1, 1));
  OracleConfig cfg;
  cfg.unrestricted = true;
  cfg.allocation_grid = 0.25;
  cfg.price_grid = 0.05;
  cfg.max_items = 3;
  OracleResult res = oracle_search(mech.rect, cfg);
  CHECK(res.revenue <= revenue(mech) + 1e-9);
  CHECK(res.revenue > 1.6);  // coarse grid still gets close
}

TEST_CASE("budget truncation is flagged") {
  OracleConfig cfg;
  cfg.budget = 10;
  OracleResult res = oracle_search(SupportRect(1.5, 1.5, 1, 1), cfg);
  CHECK(res.partial);
  CHECK(res.revenue > 0.0);
}

TEST_CASE("config validation") {
  OracleConfig bad;
  bad.allocation_grid = 0.0;
  CHECK_THROWS_AS(oracle_search(SupportRect(0, 0, 1, 1), bad), std::domain_error);
  OracleConfig bad2;
  bad2.max_items = 5;
  CHECK_THROWS_AS(oracle_search(SupportRect(0, 0, 1, 1), bad2), std::domain_error);
  CHECK_THROWS_AS(oracle_search(SupportRect(1.0, 0.5, 1, 1), OracleConfig{}),
                  std::domain_error);
}
