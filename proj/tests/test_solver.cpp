#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "menuforge/solver.hpp"

using namespace menuforge;

namespace {
double get(const std::optional<double>& v) {
  REQUIRE(v.has_value());
  return *v;
}
}  // namespace

TEST_CASE("threshold constants") {
  // beta(1.5, 1) and both lottery-collapse thresholds at b1 = 1.5 b2.
  CHECK(compute_beta(1.5, 1.0) == doctest::Approx(1.7333790559721103).epsilon(1e-7));
  CHECK(d_to_e_threshold(1.5, 1.0) == doctest::Approx(243.0 / 38.0).epsilon(1e-12));
  CHECK(dp_to_ep_threshold(1.5, 1.0) == doctest::Approx(243.0 / 38.0).epsilon(1e-12));
  // The square case: alpha2(b2, b2) = k b2 with 32 k^3 - 54 k^2 + 19 = 0.
  double k = compute_alpha2(1.0, 1.0);
  CHECK(std::abs(32.0 * k * k * k - 54.0 * k * k + 19.0) < 1e-7);
  CHECK(k == doctest::Approx(1.3721414).epsilon(1e-5));
  // alpha1 collapses to c = b2 on the square.
  CHECK(compute_alpha1(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
  // Scale covariance of every threshold.
  for (double s : {0.5, 2.0, 7.0}) {
    CHECK(compute_beta(1.5 * s, s) == doctest::Approx(s * compute_beta(1.5, 1.0)));
    CHECK(compute_alpha1(1.2 * s, s) == doctest::Approx(s * compute_alpha1(1.2, 1.0)));
    CHECK(compute_alpha2(1.2 * s, s) == doctest::Approx(s * compute_alpha2(1.2, 1.0)));
    CHECK(d_to_e_threshold(1.2 * s, s) == doctest::Approx(s * d_to_e_threshold(1.2, 1.0)));
  }
}

TEST_CASE("square support, structure C point") {
  SolveResult s = solve(1.26, 1.0, 1.0);
  CHECK(s.regime.label == StructureLabel::C);
  CHECK(get(s.params.delta1) == doctest::Approx(20.0 / 63.0).epsilon(1e-9));
  CHECK(get(s.params.delta2) == doctest::Approx(20.0 / 63.0).epsilon(1e-9));
  CHECK(get(s.params.a1) == doctest::Approx(0.6615).epsilon(2e-4));
  CHECK(get(s.params.a2) == doctest::Approx(0.6615).epsilon(2e-4));
  // On the square the exclusion vertex sits on the diagonal: delta_star = 0.
  CHECK(std::abs(get(s.params.delta_star)) < 1e-9);
}

TEST_CASE("square support, structure D point") {
  SolveResult s = solve(1.5, 1.0, 1.0);
  CHECK(s.regime.label == StructureLabel::D);
  double target = std::sqrt(5.0 / 3.0) - 1.0;
  CHECK(get(s.params.delta1) == doctest::Approx(target).epsilon(1e-11));
  CHECK(get(s.params.delta2) == doctest::Approx(target).epsilon(1e-11));
  CHECK(get(s.params.a) == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("free rectangle, structure A point") {
  SolveResult s = solve(0.0, 1.2, 1.0);
  CHECK(s.regime.label == StructureLabel::A);
  CHECK(get(s.params.delta1) == doctest::Approx(0.678837).epsilon(1e-5));
  CHECK(get(s.params.delta2) == doctest::Approx(0.589243).epsilon(1e-5));
}

TEST_CASE("structure E collapses to a posted-price pair") {
  SolveResult s = solve(14.0, 1.2, 1.0);
  CHECK(s.regime.label == StructureLabel::E);
  CHECK(get(s.params.delta1) == doctest::Approx(1.2 / 14.0).epsilon(1e-12));
  CHECK(get(s.params.delta2) == doctest::Approx(0.0));

  SolveResult sp = solve(8.0, 2.0, 1.0);
  CHECK(sp.regime.label == StructureLabel::Ep);
  CHECK(get(sp.params.delta1) == doctest::Approx(2.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("classification sweep hits every structure") {
  CHECK(classify_regime(0.2, 1.2, 1.0).label == StructureLabel::A);
  CHECK(classify_regime(1.05, 1.2, 1.0).label == StructureLabel::B);
  CHECK(classify_regime(1.30, 1.2, 1.0).label == StructureLabel::C);
  CHECK(classify_regime(1.60, 1.2, 1.0).label == StructureLabel::D);
  CHECK(classify_regime(14.0, 1.2, 1.0).label == StructureLabel::E);
  CHECK(classify_regime(2.50, 2.0, 1.0).label == StructureLabel::Dp);
  CHECK(classify_regime(9.00, 2.0, 1.0).label == StructureLabel::Ep);
}

TEST_CASE("defining equations vanish at the solved parameters") {
  for (double b1 : {1.0, 1.1, 1.3, 1.45}) {
    double c = 0.5 * (b1 + compute_alpha1(b1, 1.0));  // inside the B band
    if (compute_alpha1(b1, 1.0) > b1 * (1.0 + 1e-9)) {
      MechanismParams p = solve_structure_b(c, b1, 1.0);
      double h = get(p.h), ds = get(p.delta_star);
      CHECK(std::abs(structure_b_residual(c, b1, 1.0, h, ds)) < 1e-9);
      CHECK(structure_b_margin(c, b1, 1.0, h, ds) > -1e-9);
    }
    double c2 = 0.5 * (compute_alpha1(b1, 1.0) + compute_alpha2(b1, 1.0));
    MechanismParams q = solve_structure_c(c2, b1, 1.0);
    double h = get(q.h), ds = get(q.delta_star);
    CHECK(std::abs(structure_c_residual(c2, b1, 1.0, h, ds)) < 1e-9);
    CHECK(structure_c_margin(c2, b1, 1.0, h, ds) > -1e-9);
  }
}

TEST_CASE("parameters are continuous across regime boundaries") {
  const double b1 = 1.2, eps = 1e-7;
  auto d1 = [&](double c) { return get(solve(c, b1, 1.0).params.delta1); };
  for (double boundary : {b1, compute_alpha1(b1, 1.0), compute_alpha2(b1, 1.0),
                          d_to_e_threshold(b1, 1.0)}) {
    CHECK(d1(boundary - eps) == doctest::Approx(d1(boundary + eps)).epsilon(1e-4));
  }
  // B->Dp and Dp->Ep boundaries on a wide rectangle.
  const double w = 2.0;
  auto wd1 = [&](double c) { return get(solve(c, w, 1.0).params.delta1); };
  for (double boundary : {compute_beta(w, 1.0), dp_to_ep_threshold(w, 1.0)}) {
    CHECK(wd1(boundary - eps) == doctest::Approx(wd1(boundary + eps)).epsilon(1e-4));
  }
}

TEST_CASE("swapped orientation mirrors the solution") {
  SolveResult a = solve(1.1, 1.3, 1.0);
  SolveResult b = solve(1.1, 1.0, 1.3);
  CHECK(!a.swapped);
  CHECK(b.swapped);
  CHECK(a.regime.label == b.regime.label);
  CHECK(get(a.params.delta1) == doctest::Approx(get(b.params.delta1)).epsilon(1e-12));
  CHECK(get(a.params.delta2) == doctest::Approx(get(b.params.delta2)).epsilon(1e-12));
}

TEST_CASE("invalid inputs raise domain errors") {
  CHECK_THROWS_AS(solve(-0.1, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(solve(1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(solve_general_rect(SupportRect(1.0, 0.2, 1.0, 1.0)),
                  std::domain_error);
}
