#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "menuforge/solver.hpp"
#include "menuforge/verifier.hpp"

using namespace menuforge;

TEST_CASE("optimality conditions hold in every regime") {
  const double cases[][3] = {
      {0.0, 1.0, 1.0},  {0.4, 1.2, 1.0}, {1.05, 1.2, 1.0}, {1.26, 1.0, 1.0},
      {1.30, 1.2, 1.0}, {1.5, 1.0, 1.0}, {2.5, 2.0, 1.0},  {14.0, 1.2, 1.0},
      {9.0, 2.0, 1.0},  {1.3, 1.0, 1.2},
  };
  for (const auto& cs : cases) {
    Mechanism mech = make_mechanism(solve(cs[0], cs[1], cs[2]));
    MyersonReport report = verify_myerson(mech);
    CAPTURE(cs[0]);
    CAPTURE(cs[1]);
    CHECK(report.pass);
    CHECK(report.worst_margin >= -1e-7);
    CHECK(std::abs(verify_exclusion_balance(mech)) <= 1e-8);
    CHECK(grown_exclusion_mass(mech) < -1e-6);  // larger region goes negative
  }
}

TEST_CASE("interval structure of a one-lottery mechanism") {
  Mechanism mech = make_mechanism(solve(1.5, 1.0, 1.0));
  MyersonReport report = verify_myerson(mech);
  REQUIRE(report.intervals.size() == 3);
  CHECK(report.intervals[0].condition_set == 2);
  CHECK(report.intervals[1].condition_set == 3);
  CHECK(report.intervals[2].condition_set == 4);
  CHECK(report.intervals[0].hi == doctest::Approx(-1.0 / 3.0));
  CHECK(report.intervals[1].hi == doctest::Approx(1.0 / 3.0));
  // The interior interval's integral-zero condition is the defining equation.
  bool found = false;
  for (const auto& [name, margin] : report.intervals[1].margins)
    if (name == "3c-integral-zero") {
      found = true;
      CHECK(margin > -1e-8);
    }
  CHECK(found);
}

TEST_CASE("corrupted mechanism fails certification") {
  Mechanism mech = make_mechanism(solve(1.3, 1.2, 1.0));
  mech.menu.items[1].price += 0.05;
  MyersonReport report = verify_myerson(mech);
  CHECK(!report.pass);
  CHECK(report.worst_margin < -1e-3);
}

TEST_CASE("report serializes to json") {
  Mechanism mech = make_mechanism(solve(1.26, 1.0, 1.0));
  MyersonReport report = verify_myerson(mech);
  std::string text = report_to_json(report);
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
  CHECK(text.find("\"pass\": true") != std::string::npos);
}

TEST_CASE("defining integral changes sign across the B-to-C threshold") {
  const double b1 = 1.2, b2 = 1.0;
  double a1 = compute_alpha1(b1, b2);
  auto margin = [&](double c) {
    MechanismParams p = solve_structure_b(c, b1, b2);
    return structure_b_margin(c, b1, b2, *p.h, *p.delta_star);
  };
  CHECK(margin(a1 - 1e-4) > 0.0);
  CHECK(margin(a1 + 1e-4) < 0.0);
}

TEST_CASE("inequality sweeps pass on coarse grids") {
  // Full 50x50 grids run in the acceptance suite; 12x12 here keeps the
  // module test fast while still covering every check id.
  REQUIRE(certify_check_ids().size() == 9);
  for (const std::string& id : certify_check_ids()) {
    SweepReport report = certify_sweep(id, 12);
    CAPTURE(id);
    CHECK(report.pass);
    CHECK(report.worst_margin >= -1e-9);
    CHECK(report.rows.size() == 144);
  }
}

TEST_CASE("sweeps are deterministic and worker-count independent") {
  SweepReport one = certify_sweep("c1-2-delta2-bound", 8, 1);
  SweepReport many = certify_sweep("c1-2-delta2-bound", 8, 7);
  REQUIRE(one.rows.size() == many.rows.size());
  for (size_t i = 0; i < one.rows.size(); ++i)
    for (int k = 0; k < 4; ++k) CHECK(one.rows[i][k] == many.rows[i][k]);
  std::string csv = sweep_to_csv(one);
  CHECK(csv.rfind("c,b1,b2,margin\n", 0) == 0);
}

TEST_CASE("sweep consistency with direct evaluation at one point") {
  SweepReport report = certify_sweep("c1-2-delta2-bound", 8, 1);
  // Grid corner (s=0, u=0): c=1, b1=1, b2=1.
  MechanismParams p = solve_structure_b(1.0, 1.0, 1.0);
  CHECK(report.rows[0][3] == doctest::Approx(1.0 / 3.0 - *p.delta2).epsilon(1e-12));
  CHECK_THROWS_AS(certify_sweep("no-such-check", 8), std::domain_error);
  CHECK_THROWS_AS(certify_sweep("c1-2-delta2-bound", 1), std::domain_error);
}
