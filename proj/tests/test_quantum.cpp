#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "spooky/quantum.hpp"

using namespace spooky::quantum;

TEST_CASE("singlet correlation analytic values") {
  const NoisySingletState ideal{1.0};
  CHECK(correlation(ideal, {0.3}, {0.3}) == doctest::Approx(-1.0));
  CHECK(correlation(ideal, {M_PI / 4.0}, {0.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(correlation({0.913}, {0.0}, {M_PI / 8.0}) ==
        doctest::Approx(-0.645588491223318).epsilon(1e-12));
  CHECK_THROWS_AS(correlation({1.5}, {0.0}, {0.0}), std::domain_error);
}

TEST_CASE("property: |E| <= V with equality at aligned bases, rotation invariant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(-10.0, 10.0), vis(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const NoisySingletState st{vis(rng)};
    const double ta = ang(rng), tb = ang(rng), phi = ang(rng);
    const double e = correlation(st, {ta}, {tb});
    CHECK(std::abs(e) <= st.visibility + 1e-12);
    CHECK(correlation(st, {ta + phi}, {tb + phi}) == doctest::Approx(e).epsilon(1e-9));
  }
  CHECK(std::abs(correlation({0.7}, {1.0}, {1.0 + M_PI})) ==
        doctest::Approx(0.7));
}

TEST_CASE("sampling reproduces the analytic correlation and uniform marginals") {
  std::mt19937_64 rng(20260824);
  const int n = 100000;
  const double se = 1.0 / std::sqrt(double(n));

  SUBCASE("perfect anticorrelation at equal settings") {
    const NoisySingletState st{1.0};
    for (int i = 0; i < 1000; ++i) {
      const auto o = sample_outcome(st, {0.4}, {0.4}, rng);
      CHECK(o.outcome_a * o.outcome_b == -1);
    }
  }
  SUBCASE("white noise decorrelates") {
    const NoisySingletState st{0.0};
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto o = sample_outcome(st, {0.1}, {0.9}, rng);
      sum += o.outcome_a * o.outcome_b;
    }
    CHECK(std::abs(sum / n) < 4.0 * se);
  }
  SUBCASE("lab visibility at the standard settings, plus marginals") {
    const NoisySingletState st{0.913};
    const auto s = optimal_settings();
    const PolarizationSetting sa[] = {s.a, s.a_prime};
    const PolarizationSetting sb[] = {s.b, s.b_prime};
    for (int ia = 0; ia < 2; ++ia)
      for (int ib = 0; ib < 2; ++ib) {
        double sum = 0.0, ma = 0.0, mb = 0.0;
        for (int i = 0; i < n; ++i) {
          const auto o = sample_outcome(st, sa[ia], sb[ib], rng);
          sum += o.outcome_a * o.outcome_b;
          ma += o.outcome_a;
          mb += o.outcome_b;
        }
        CHECK(std::abs(sum / n - correlation(st, sa[ia], sb[ib])) < 4.0 * se);
        CHECK(std::abs(ma / n) < 4.0 * se);
        CHECK(std::abs(mb / n) < 4.0 * se);
      }
  }
}

TEST_CASE("CHSH combination") {
  const auto s = optimal_settings();
  CHECK(s.a.angle_rad == 0.0);
  CHECK(s.a_prime.angle_rad == doctest::Approx(M_PI / 4.0));
  CHECK(s.b.angle_rad == doctest::Approx(M_PI / 8.0));
  CHECK(s.b_prime.angle_rad == doctest::Approx(-M_PI / 8.0));

  auto analytic_s = [&s](double vis, ChshCombination comb) {
    const NoisySingletState st{vis};
    return chsh_value(correlation(st, s.a, s.b), correlation(st, s.a_prime, s.b),
                      correlation(st, s.a, s.b_prime),
                      correlation(st, s.a_prime, s.b_prime), comb);
  };

  CHECK(analytic_s(1.0, ChshCombination::MinusOnApBp) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(analytic_s(0.913, ChshCombination::MinusOnApBp) ==
        doctest::Approx(0.913 * 2.0 * std::sqrt(2.0)).epsilon(1e-14));
  // Classical boundary: V such that V * 2 sqrt(2) = 2.
  CHECK(analytic_s(2.0 / (2.0 * std::sqrt(2.0)), ChshCombination::MinusOnApBp) ==
        doctest::Approx(2.0).epsilon(1e-12));
  // The literal all-plus sum only reaches sqrt(2) at these angles.
  CHECK(analytic_s(1.0, ChshCombination::AllPlus) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(chsh_value(0, 0, 0, 0) == 0.0);
}

TEST_CASE("property: S is linear in visibility and obeys the Tsirelson bound") {
  const auto s = optimal_settings();
  for (int i = 1; i <= 10; ++i) {
    const double v = i / 10.0;
    const NoisySingletState st{v};
    const double sv =
        chsh_value(correlation(st, s.a, s.b), correlation(st, s.a_prime, s.b),
                   correlation(st, s.a, s.b_prime),
                   correlation(st, s.a_prime, s.b_prime));
    CHECK(sv == doctest::Approx(v * 2.0 * std::sqrt(2.0)).epsilon(1e-12));
  }

  // 100x100 angle grid with the ideal singlet never exceeds 2 sqrt(2).
  const NoisySingletState ideal{1.0};
  const double tsirelson = 2.0 * std::sqrt(2.0);
  for (int ia = 0; ia < 100; ++ia)
    for (int ib = 0; ib < 100; ++ib) {
      const double a = M_PI * ia / 100.0, b = M_PI * ib / 100.0;
      const double sv = chsh_value(
          correlation(ideal, {a}, {b}), correlation(ideal, {a + M_PI / 4.0}, {b}),
          correlation(ideal, {a}, {b - M_PI / 4.0}),
          correlation(ideal, {a + M_PI / 4.0}, {b - M_PI / 4.0}));
      CHECK(sv <= tsirelson + 1e-9);
    }
}
