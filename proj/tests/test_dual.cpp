#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "menuforge/dual.hpp"
#include "menuforge/measure.hpp"
#include "menuforge/mechanism.hpp"

using namespace menuforge;

namespace {

SegmentMeasure group_measure(const TransportPlan& plan, const std::vector<int>& idx) {
  std::vector<SegmentMeasure> ms;
  std::string name;
  for (int i : idx) {
    ms.push_back(plan.shuffles[i]);
    name += plan.shuffles[i].name;
  }
  return combine_measures(name, ms);
}

}  // namespace

TEST_CASE("example constants and densities") {
  auto p1 = build_example(1);
  CHECK(p1.mech.params.delta1.value() == doctest::Approx(20.0 / 63.0).epsilon(1e-9));
  // ramp density 3t - 1 on the first two thirds of the top edge
  CHECK(p1.shuffles[0].density(0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p1.shuffles[0].density(2.0 / 3.0 - 1e-9) == doctest::Approx(1.0).epsilon(1e-6));
  // cap branch ends at 3 - 3 a d2 - c - 1
  const double a = p1.mech.params.a2.value(), d2 = p1.mech.params.delta2.value();
  CHECK(p1.shuffles[1].density(1.0) ==
        doctest::Approx(3.0 - 3.0 * a * d2 - 2.26).epsilon(1e-9));

  auto p2 = build_example(2);
  const double s33 = std::sqrt(33.0);
  CHECK(p2.shuffle_a == doctest::Approx((27.0 - 3.0 * s33) / 32.0).epsilon(1e-15));
  const double ds = ((3.0 + s33) / 8.0 - 1.0) / p2.shuffle_a;
  CHECK(p2.shuffle_delta == doctest::Approx(ds).epsilon(1e-15));
  CHECK(p2.shuffle_delta > p2.mech.params.delta2.value());  // wider than the menu offset
  const SegmentMeasure* lam = nullptr;
  for (const auto& m : p2.shuffles)
    if (m.name == "lambda") lam = &m;
  REQUIRE(lam != nullptr);
  // supported on z1 + z2 = 2c + ds, symmetric about the diagonal
  for (double q : {-0.9, -0.4, 0.1, 0.7}) {
    const double p = lam->p_lo + (lam->p_hi - lam->p_lo) * (q + 1.0) / 2.0;
    const Point z = lam->point_at(p);
    CHECK(z.x + z.y == doctest::Approx(2.0 * 1.5 + ds).epsilon(1e-12));
    CHECK(lam->density(p) == doctest::Approx(lam->density(-p)).epsilon(1e-12));
  }
  CHECK(lam->density(-ds + 1e-12) == doctest::Approx(1.5).epsilon(1e-6));

  auto p3 = build_example(3);
  const double d1 = p3.mech.params.delta1.value();
  CHECK(d1 == doctest::Approx(0.678837).epsilon(2e-6));
  // horizontal correction density 3 (t - d1 + 0.2) / 1.2 on [d1 - 0.2, d2]
  const SegmentMeasure* ah = nullptr;
  for (const auto& m : p3.shuffles)
    if (m.name == "alpha_h") ah = &m;
  REQUIRE(ah != nullptr);
  CHECK(ah->density(0.52) == doctest::Approx(3.0 * (0.52 - d1 + 0.2) / 1.2).epsilon(1e-9));

  CHECK_THROWS_AS(build_example(0), std::domain_error);
  CHECK_THROWS_AS(build_example(4), std::domain_error);
}

TEST_CASE("convex dominance of every shuffling group") {
  for (int n = 1; n <= 3; ++n) {
    auto plan = build_example(n);
    for (const auto& g : plan.dominance_groups) {
      auto rep = check_convex_dominance(group_measure(plan, g));
      CAPTURE(n);
      CHECK(rep.pass);
      CHECK(std::abs(rep.total_mass) <= 1e-12);
      CHECK(rep.first_moment >= -1e-12);
      CHECK(rep.min_hinge >= -1e-12);
    }
  }

  // ramp measure: mass zero, strictly positive moment
  auto p1 = build_example(1);
  auto ramp = check_convex_dominance(p1.shuffles[0]);
  CHECK(ramp.total_mass == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ramp.first_moment == doctest::Approx(2.0 / 27.0).epsilon(1e-12));
  // cap measure: mass zero AND moment zero
  auto cap = check_convex_dominance(p1.shuffles[1]);
  CHECK(std::abs(cap.total_mass) <= 1e-12);
  CHECK(std::abs(cap.first_moment) <= 1e-12);
}

TEST_CASE("example 3 closed-form mass and moment of the top correction") {
  auto plan = build_example(3);
  const double d1 = plan.mech.params.delta1.value();
  const double d2 = plan.mech.params.delta2.value();
  // mass: (3/2)(1-d2)^2 - (1-d2) + d1 (2 - 3 d2) vanishes at the solution
  CHECK(std::abs(1.5 * (1.0 - d2) * (1.0 - d2) - (1.0 - d2) + d1 * (2.0 - 3.0 * d2)) <=
        1e-9);
  CHECK(std::abs(plan.shuffles[0].mass()) <= 1e-12);
  // first moment (densities carry the 1/(b1 b2) = 1/1.2 prefactor)
  CHECK(plan.shuffles[0].first_moment() * 1.2 == doctest::Approx(0.103227).epsilon(1e-4));
}

TEST_CASE("decreasing atom transfer fails dominance") {
  SegmentMeasure m;
  m.name = "bad";
  m.start = {0.0, 1.0};
  m.end = {1.0, 1.0};
  m.p_lo = 0.0;
  m.p_hi = 1.0;
  m.atoms = {{0.0, 1.0}, {1.0, -1.0}};
  auto rep = check_convex_dominance(m);
  CHECK(!rep.pass);
  CHECK(std::abs(rep.total_mass) <= 1e-15);
  CHECK(rep.min_hinge < -1e-3);
}

TEST_CASE("strong duality for all three examples") {
  const double expected[3] = {1.4221481481, 1.6499027814, 0.0};
  for (int n = 1; n <= 3; ++n) {
    auto plan = build_example(n);
    auto rep = strong_duality(plan);
    CAPTURE(n);
    CHECK(rep.pass);
    CHECK(rep.gap <= 1e-9);  // far inside the 1e-4 requirement
    if (n <= 2) CHECK(rep.primal == doctest::Approx(expected[n - 1]).epsilon(1e-8));
  }
  // mass that stays put (identity on the exclusion region) costs nothing
  auto idle = build_example(1);
  idle.delta_breaks.clear();
  idle.horizontal_breaks.clear();
  CHECK(dual_cost(idle) == 0.0);
}

TEST_CASE("marginal identity gamma1 - gamma2 = mu_bar + shuffling") {
  for (int n = 1; n <= 3; ++n) {
    auto rep = check_marginals(build_example(n));
    CAPTURE(n);
    CHECK(rep.pass);
    CHECK(rep.worst_fiber_residual <= 1e-12);
    CHECK(rep.worst_segment_residual <= 1e-12);
  }
}

TEST_CASE("complementary slackness") {
  for (int n = 1; n <= 3; ++n) {
    auto plan = build_example(n);
    auto rep = check_complementary_slackness(plan.mech, plan);
    CAPTURE(n);
    CHECK(rep.pass);
    CHECK(rep.max_kernel_violation <= 1e-12);
    CHECK(rep.pairing_gap <= 1e-9);
  }
  // shifting the 45-degree targets off-diagonal must break the pairing
  auto bad = build_example(1);
  bad.perturb_offset = 0.01;
  auto rep = check_complementary_slackness(bad.mech, bad);
  CHECK(!rep.pass);
  CHECK(rep.max_kernel_violation > 1e-3);
}

TEST_CASE("exclusion-region mass balance of example 1") {
  auto plan = build_example(1);
  const SupportRect& r = plan.mech.rect;
  // signed mass of mu_bar on Z vanishes: unit atom against negative parts
  CHECK(std::abs(mu_bar_of(r, plan.mech.exclusion)) <= 1e-9);
  // the negative part alone: area density plus bottom/left edge densities
  const double d1 = plan.mech.params.delta1.value();
  const double d2 = plan.mech.params.delta2.value();
  const double neg = 3.0 * polygon_area(plan.mech.exclusion) + r.c1 * (d1 + d2);
  CHECK(neg == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("density CSV export") {
  auto plan = build_example(2);
  const std::string csv = density_csv(plan, 8);
  CHECK(csv.rfind("measure,p,z1,z2,density\n", 0) == 0);
  for (const char* name : {"alpha1", "beta1", "alpha2", "beta2", "lambda"})
    CHECK(csv.find(name) != std::string::npos);
  std::istringstream is(csv);
  std::string line;
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows > 50);
}
