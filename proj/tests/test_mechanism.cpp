#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "menuforge/mechanism.hpp"
#include "menuforge/solver.hpp"

using namespace menuforge;

namespace {
const double kCases[][3] = {
    {0.4, 1.2, 1.0},   // A
    {1.05, 1.2, 1.0},  // B
    {1.26, 1.0, 1.0},  // C (square)
    {1.30, 1.2, 1.0},  // C
    {1.5, 1.0, 1.0},   // D
    {2.5, 2.0, 1.0},   // Dp
    {14.0, 1.2, 1.0},  // E
    {9.0, 2.0, 1.0},   // Ep
};
}

TEST_CASE("menu sizes per structure") {
  auto size_of = [](double c, double b1, double b2) {
    return make_mechanism(solve(c, b1, b2)).menu.items.size();
  };
  CHECK(size_of(0.4, 1.2, 1.0) == 3);   // A: two pure items + null
  CHECK(size_of(1.05, 1.2, 1.0) == 4);  // B: one lottery
  CHECK(size_of(1.30, 1.2, 1.0) == 5);  // C: two lotteries
  CHECK(size_of(1.5, 1.0, 1.0) == 4);   // D: one lottery
  CHECK(size_of(14.0, 1.2, 1.0) == 3);  // E: posted prices
}

TEST_CASE("revenue matches the measure identity in every regime") {
  for (const auto& cs : kCases) {
    Mechanism mech = make_mechanism(solve(cs[0], cs[1], cs[2]));
    double r = revenue(mech);
    double rm = revenue_via_measure(mech);
    CAPTURE(cs[0]);
    CHECK(r == doctest::Approx(rm).epsilon(1e-10));
    CHECK(r > cs[0]);  // selling both goods beats the corner value floor
  }
}

TEST_CASE("frozen revenue values") {
  // Independently derived by direct numeric optimization over constrained
  // menus (free search over prices and allocations converges to these).
  CHECK(revenue(make_mechanism(solve(1.26, 1.0, 1.0))) ==
        doctest::Approx(1.4221481481).epsilon(1e-9));
  double r15 = revenue(make_mechanism(solve(1.5, 1.0, 1.0)));
  CHECK(r15 == doctest::Approx(1.6499028).epsilon(1e-6));
}

TEST_CASE("partition covers the rectangle") {
  for (const auto& cs : kCases) {
    Mechanism mech = make_mechanism(solve(cs[0], cs[1], cs[2]));
    double total = 0.0;
    for (const auto& [idx, cell] : mech.partition)
      total += region_probability(cell, mech.rect);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("best response agrees with the partition cells") {
  std::mt19937 rng(11);
  for (const auto& cs : kCases) {
    Mechanism mech = make_mechanism(solve(cs[0], cs[1], cs[2]));
    std::uniform_real_distribution<double> U1(mech.rect.c1, mech.rect.c1 + mech.rect.b1);
    std::uniform_real_distribution<double> U2(mech.rect.c2, mech.rect.c2 + mech.rect.b2);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
      Point z{U1(rng), U2(rng)};
      int br = best_response(mech, z);
      // Skip points within 1e-9 of any cell boundary (ties there are free).
      bool boundary = false;
      int owner = -1;
      for (const auto& [idx, cell] : mech.partition) {
        bool in = point_in_polygon(z, cell, 1e-9);
        bool in_shrunk = point_in_polygon(z, cell, -1e-6);
        if (in && !in_shrunk) boundary = true;
        if (in_shrunk) owner = idx;
      }
      if (boundary || owner < 0) continue;
      ++checked;
      CHECK(br == owner);
    }
    CHECK(checked > 1000);
  }
}

TEST_CASE("allocation profile is monotone and right-continuous") {
  for (const auto& cs : kCases) {
    Mechanism mech = make_mechanism(solve(cs[0], cs[1], cs[2]));
    auto bps = allocation_breakpoints(mech);
    double prev = -1.0;
    for (double b : bps) {
      CHECK(b > prev);
      prev = b;
      double ql = utility_profile(mech, b - 1e-9).q1;
      double q0 = utility_profile(mech, b).q1;
      double qr = utility_profile(mech, b + 1e-9).q1;
      CHECK(q0 == doctest::Approx(qr).epsilon(1e-9));  // right-continuity
      CHECK(qr > ql - 1e-12);                          // monotone jumps up
    }
    // q1 weakly increases along a fine sweep.
    double last = -1.0;
    for (int i = 0; i <= 300; ++i) {
      double delta = -cs[2] + (cs[1] + cs[2]) * i / 300.0;
      double q = utility_profile(mech, delta).q1;
      CHECK(q >= last - 1e-12);
      last = q;
    }
  }
}

TEST_CASE("wide-rectangle allocation jump sits at b1/2 - b2/4") {
  // For the wide-rectangle lottery structure the jump to the pure first
  // good moves from b1/3 to b1/2 - b2/4; the virtual value vanishes there.
  SolveResult s = solve(2.5, 2.0, 1.0);
  REQUIRE(s.regime.label == StructureLabel::Dp);
  Mechanism mech = make_mechanism(s);
  auto bps = allocation_breakpoints(mech);
  REQUIRE(!bps.empty());
  double jump = bps.back();
  CHECK(jump == doctest::Approx(2.0 / 2.0 - 1.0 / 4.0).epsilon(1e-9));
  PiecewiseV pv = closed_form_V(s.regime.label, s.params, s.rect);
  CHECK(std::abs(pv.eval(jump)) < 1e-9);
}

TEST_CASE("exclusion region shape per structure") {
  CHECK(make_mechanism(solve(0.4, 1.2, 1.0)).exclusion.v.size() == 4);   // A: rectangle
  CHECK(make_mechanism(solve(1.05, 1.2, 1.0)).exclusion.v.size() == 4);  // B: quad
  CHECK(make_mechanism(solve(1.5, 1.0, 1.0)).exclusion.v.size() == 3);   // D: triangle
  Mechanism e = make_mechanism(solve(14.0, 1.2, 1.0));
  REQUIRE(e.exclusion.v.size() == 2);  // E: bottom-edge segment
  CHECK(e.exclusion.v[1].x - e.exclusion.v[0].x ==
        doctest::Approx(1.2 / 14.0).epsilon(1e-12));
}

TEST_CASE("item swap symmetry") {
  Mechanism a = make_mechanism(solve(1.3, 1.2, 1.0));
  Mechanism b = make_mechanism(solve(1.3, 1.0, 1.2));
  CHECK(b.swapped);
  CHECK(revenue(a) == doctest::Approx(revenue(b)).epsilon(1e-12));
  REQUIRE(a.menu.items.size() == b.menu.items.size());
  for (size_t i = 0; i < a.menu.items.size(); ++i) {
    CHECK(a.menu.items[i].q1 == doctest::Approx(b.menu.items[i].q2));
    CHECK(a.menu.items[i].price == doctest::Approx(b.menu.items[i].price));
  }
  CHECK(polygon_area(a.exclusion) == doctest::Approx(polygon_area(b.exclusion)));
}

TEST_CASE("json round trip") {
  Mechanism mech = make_mechanism(solve(1.3, 1.2, 1.0));
  std::string text = to_json(mech, revenue(mech));
  CHECK(text.find("\"schema_version\": 1") != std::string::npos);
  Mechanism back = mechanism_from_json(text);
  CHECK(back.regime.label == mech.regime.label);
  REQUIRE(back.menu.items.size() == mech.menu.items.size());
  for (size_t i = 0; i < mech.menu.items.size(); ++i)
    CHECK(back.menu.items[i].price == doctest::Approx(mech.menu.items[i].price));
  CHECK(revenue(back) == doctest::Approx(revenue(mech)).epsilon(1e-14));
  CHECK(back.exclusion.v.size() == mech.exclusion.v.size());
  CHECK(back.partition.size() == mech.partition.size());
}
