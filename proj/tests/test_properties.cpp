#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "menuforge/measure.hpp"
#include "menuforge/mechanism.hpp"
#include "menuforge/solver.hpp"

using namespace menuforge;

namespace {

struct Draw {
  double c, b1, b2;
};

// 1000 parameter draws covering all seven structures and a spread of scales.
std::vector<Draw> make_draws() {
  std::mt19937_64 rng(20260826);
  std::uniform_real_distribution<double> uc(0.0, 12.0);
  std::uniform_real_distribution<double> ub1(1.0, 2.2);
  std::uniform_real_distribution<double> uscale(0.2, 5.0);
  std::vector<Draw> draws;
  draws.reserve(1000);
  for (int i = 0; i < 1000; ++i) {
    const double s = (i % 4 == 0) ? uscale(rng) : 1.0;
    draws.push_back({uc(rng) * s, ub1(rng) * s, s});
  }
  return draws;
}

const std::vector<Draw>& draws() {
  static const std::vector<Draw> d = make_draws();
  return d;
}

}  // namespace

TEST_CASE("scaling covariance: parameters and revenue are homogeneous") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uscale(0.3, 4.0);
  int checked = 0;
  for (size_t i = 0; i < draws().size(); i += 5) {
    const Draw& d = draws()[i];
    const double s = uscale(rng);
    auto base = solve(d.c, d.b1, d.b2);
    auto scaled = solve(s * d.c, s * d.b1, s * d.b2);
    CAPTURE(d.c);
    CAPTURE(d.b1);
    CAPTURE(s);
    REQUIRE(scaled.regime.label == base.regime.label);
    auto cmp = [&](const std::optional<double>& a, const std::optional<double>& b) {
      REQUIRE(a.has_value() == b.has_value());
      if (a) CHECK(*b == doctest::Approx(s * *a).epsilon(1e-8));
    };
    cmp(base.params.delta1, scaled.params.delta1);
    cmp(base.params.delta2, scaled.params.delta2);
    cmp(base.params.delta_star, scaled.params.delta_star);
    cmp(base.params.h, scaled.params.h);
    // allocation fractions are scale-invariant
    if (base.params.a)
      CHECK(*scaled.params.a == doctest::Approx(*base.params.a).epsilon(1e-8));
    const double r0 = revenue(make_mechanism(base));
    const double r1 = revenue(make_mechanism(scaled));
    CHECK(r1 == doctest::Approx(s * r0).epsilon(1e-8));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("item-swap symmetry: exchanging the sides exchanges the items") {
  for (size_t i = 0; i < draws().size(); i += 7) {
    const Draw& d = draws()[i];
    auto fwd = make_mechanism(solve(d.c, d.b1, d.b2));
    auto rev = make_mechanism(solve(d.c, d.b2, d.b1));
    CAPTURE(d.c);
    CAPTURE(d.b1);
    CHECK(rev.swapped == (d.b1 > d.b2));
    CHECK(revenue(rev) == doctest::Approx(revenue(fwd)).epsilon(1e-10));
    // swapped menu is the mirror image of the forward menu
    REQUIRE(rev.menu.items.size() == fwd.menu.items.size());
    for (size_t k = 0; k < fwd.menu.items.size(); ++k) {
      CHECK(rev.menu.items[k].q1 == doctest::Approx(fwd.menu.items[k].q2).epsilon(1e-10));
      CHECK(rev.menu.items[k].q2 == doctest::Approx(fwd.menu.items[k].q1).epsilon(1e-10));
      CHECK(rev.menu.items[k].price ==
            doctest::Approx(fwd.menu.items[k].price).epsilon(1e-10));
    }
  }
}

TEST_CASE("mu_bar of the whole rectangle is zero") {
  for (size_t i = 0; i < draws().size(); i += 3) {
    const Draw& d = draws()[i];
    SupportRect rect{d.c, d.c, d.b1, d.b2};
    CHECK(std::abs(mu_bar_of(rect, rect.polygon())) <= 1e-10 * (1.0 + d.c));
  }
}

TEST_CASE("virtual value vanishes at the right endpoint") {
  for (size_t i = 0; i < draws().size(); i += 3) {
    const Draw& d = draws()[i];
    auto mech = make_mechanism(solve(d.c, d.b1, d.b2));
    auto pv = fit_V(mech.rect, mech.exclusion);
    const double scale = 1.0 + d.c / d.b2 + d.b1 / d.b2;
    CHECK(std::abs(pv.eval(pv.domain_hi())) <= 1e-9 * scale);
  }
}

TEST_CASE("allocation q1 is a nondecreasing step function of the offset") {
  for (size_t i = 0; i < draws().size(); i += 3) {
    const Draw& d = draws()[i];
    auto mech = make_mechanism(solve(d.c, d.b1, d.b2));
    const double b1 = mech.rect.b1, b2 = mech.rect.b2;
    double prev = -1.0;
    for (int k = 0; k <= 40; ++k) {
      const double delta = -b2 + (b1 + b2) * k / 40.0;
      const double q1 = utility_profile(mech, delta).q1;
      CAPTURE(d.c);
      CAPTURE(delta);
      CHECK(q1 >= prev - 1e-12);
      CHECK(q1 >= -1e-12);
      CHECK(q1 <= 1.0 + 1e-12);
      prev = q1;
    }
  }
}

TEST_CASE("allocation constant on 45-degree lines and full outside exclusion") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (size_t i = 0; i < draws().size(); i += 4) {
    const Draw& d = draws()[i];
    auto mech = make_mechanism(solve(d.c, d.b1, d.b2));
    const SupportRect& r = mech.rect;
    for (int k = 0; k < 6; ++k) {
      Point z{r.c1 + u01(rng) * r.b1, r.c2 + u01(rng) * r.b2};
      const int idx = best_response(mech, z);
      const MenuItem& it = mech.menu.items[idx];
      const bool excluded = point_in_polygon(z, mech.exclusion, 1e-9);
      if (!excluded && idx != 0) {
        CAPTURE(z.x);
        CAPTURE(z.y);
        CHECK(it.q1 + it.q2 == doctest::Approx(1.0).epsilon(1e-12));
        // march along the 45-degree line: the chosen allocation cannot change
        const double room = std::min(r.c1 + r.b1 - z.x, r.c2 + r.b2 - z.y);
        for (double t : {0.25 * room, 0.7 * room}) {
          const int j = best_response(mech, {z.x + t, z.y + t});
          CHECK(mech.menu.items[j].q1 == doctest::Approx(it.q1).epsilon(1e-12));
          CHECK(mech.menu.items[j].q2 == doctest::Approx(it.q2).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("geometric and closed-form virtual values agree") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (size_t i = 0; i < draws().size(); i += 3) {
    const Draw& d = draws()[i];
    auto s = solve(d.c, d.b1, d.b2);
    auto mech = make_mechanism(s);
    const SupportRect& r = mech.rect;
    // closed form is stated in the canonical (unswapped) orientation
    const SupportRect canon =
        mech.swapped ? SupportRect{r.c2, r.c1, r.b2, r.b1} : r;
    for (int k = 0; k < 8; ++k) {
      const double delta = -canon.b2 + (canon.b1 + canon.b2) * u01(rng);
      const double vg = virtual_value_geometric(
          canon, menuforge::make_mechanism(solve(d.c, canon.b1, canon.b2)).exclusion,
          delta);
      const double vc =
          virtual_value_closed_form(s.regime.label, s.params, canon, delta);
      CAPTURE(d.c);
      CAPTURE(delta);
      CHECK(std::abs(vg - vc) <= 1e-8);
    }
  }
}

TEST_CASE("revenue agrees with the measure identity and JSON round-trips") {
  for (size_t i = 0; i < draws().size(); i += 10) {
    const Draw& d = draws()[i];
    auto mech = make_mechanism(solve(d.c, d.b1, d.b2));
    const double r1 = revenue(mech);
    const double r2 = revenue_via_measure(mech);
    CHECK(std::abs(r1 - r2) <= 1e-9 * (1.0 + r1));
    auto back = mechanism_from_json(to_json(mech, r1));
    CHECK(revenue(back) == doctest::Approx(r1).epsilon(1e-12));
    CHECK(back.regime.label == mech.regime.label);
  }
}
