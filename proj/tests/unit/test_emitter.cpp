#include <cmath>

#include "doctest.h"
#include "qng/emitter.hpp"

using namespace qng;
using doctest::Approx;

namespace {

EnsembleParams ensemble(int m, double eta, double nbar = 0.0) {
  EnsembleParams p;
  p.emitters = m;
  p.efficiency = eta;
  p.noise_mean = nbar;
  return p;
}

// Click probabilities of the same source by inclusion-exclusion over its
// no-click profile.
ClickProbabilities via_profile(const EnsembleParams& p, int order, SourceMode mode) {
  return click_stats(source_no_click_profile(p, order + 1, mode), order);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS(ensemble(0, 0.3).validate());
  CHECK_THROWS(ensemble(1, 1.3).validate());
  CHECK_THROWS(ensemble(1, 0.3, -1.0).validate());
  EnsembleParams p = ensemble(1, 0.3);
  p.loss = 1.5;
  CHECK_THROWS(p.validate());
  p.loss = 1.0;
  p.storage_time = 0.0;
  CHECK_THROWS(p.validate());
  CHECK(ensemble(3, 0.2, 0.01).total_noise() == Approx(0.03));
}

TEST_CASE("no-click examples") {
  CHECK(ideal_no_click(ensemble(2, 0.3), 1, 3) == Approx(0.81).epsilon(1e-14));
  CHECK(ideal_no_click(ensemble(2, 0.3), 0, 3) == 1.0);
  CHECK(ideal_no_click(ensemble(4, 0.0), 2, 3) == 1.0);
  CHECK(noisy_no_click(ensemble(1, 0.3, 0.01), 1, 2) == Approx(0.85 * std::exp(-0.005)).epsilon(1e-14));
  CHECK(noisy_no_click(ensemble(1, 0.3, 0.01), 1, 2) == Approx(0.845760).epsilon(1e-6));
  CHECK(noisy_no_click(ensemble(3, 0.4), 2, 4) == ideal_no_click(ensemble(3, 0.4), 2, 4));
  EnsembleParams dark = ensemble(2, 0.5, 0.2);
  dark.loss = 0.0;
  for (int k = 0; k <= 3; ++k) CHECK(noisy_no_click(dark, k, 3) == 1.0);
  CHECK_THROWS_AS(ideal_no_click(ensemble(1, 0.3), 4, 3), std::out_of_range);
}

TEST_CASE("loss rescales efficiency and noise") {
  EnsembleParams lossy = ensemble(2, 0.4, 0.02);
  lossy.loss = 0.5;
  const EnsembleParams equivalent = ensemble(2, 0.2, 0.01);
  for (int k = 0; k <= 3; ++k) {
    CHECK(noisy_no_click(lossy, k, 3) == Approx(noisy_no_click(equivalent, k, 3)).epsilon(1e-14));
  }
  EnsembleParams unit = ensemble(2, 0.4, 0.02);
  unit.loss = 1.0;
  CHECK(noisy_no_click(unit, 2, 3) == noisy_no_click(ensemble(2, 0.4, 0.02), 2, 3));
}

TEST_CASE("escape averaging") {
  EnsembleParams p = ensemble(1, 0.3);
  p.storage_time = 1.0;
  p.window_length = 1.0;
  // (1/t_M) int_0^{t_M} (1 - 0.15 e^{-t}) dt = 1 - 0.15 (1 - e^{-1})
  CHECK(escape_averaged_no_click(p, 1, 2) == Approx(1 - 0.15 * (1 - std::exp(-1.0))).epsilon(1e-13));
  CHECK(escape_averaged_no_click(p, 1, 2) == Approx(0.905182).epsilon(1e-6));

  EnsembleParams q = ensemble(3, 0.4, 0.02);
  q.storage_time = 1.0;
  q.window_length = 1e-9;
  for (int k = 0; k <= 4; ++k) {
    CHECK(std::abs(escape_averaged_no_click(q, k, 4) - noisy_no_click(q, k, 4)) <= 1e-9);
  }
  q.window_length = 0.0;
  CHECK(escape_averaged_no_click(q, 2, 4) == Approx(noisy_no_click(q, 2, 4)).epsilon(1e-15));
  q.window_start = 0.5;
  EnsembleParams decayed = ensemble(3, 0.4 * std::exp(-0.5), 0.02 * std::exp(-0.5));
  CHECK(escape_averaged_no_click(q, 2, 4) == Approx(noisy_no_click(decayed, 2, 4)).epsilon(1e-13));
  EnsembleParams forever = ensemble(2, 0.3, 0.01);
  forever.window_length = 5.0;
  CHECK(escape_averaged_no_click(forever, 1, 3) == Approx(noisy_no_click(forever, 1, 3)).epsilon(1e-15));
}

TEST_CASE("source click statistics examples") {
  const ClickProbabilities ideal = source_click_stats(ensemble(2, 0.3), 2, SourceMode::ideal);
  CHECK(ideal.success == Approx(0.02).epsilon(1e-13));
  CHECK(ideal.error == 0.0);
  const ClickProbabilities noisy = source_click_stats(ensemble(1, 0.3, 0.01), 1, SourceMode::noisy);
  CHECK(noisy.success == Approx(1 - 0.85 * std::exp(-0.005)).epsilon(1e-13));
  CHECK(noisy.success == Approx(0.154240).epsilon(1e-5));
  // noise is ignored in the ideal mode
  CHECK(source_click_stats(ensemble(2, 0.3, 0.5), 2, SourceMode::ideal).error == 0.0);
}

TEST_CASE("m emitters never click m + 1 detectors") {
  for (int m = 1; m <= 6; ++m) {
    for (double eta : {0.1, 0.3, 0.9, 1.0}) {
      for (int n = m; n <= 6; ++n) {
        CHECK(std::abs(source_click_stats(ensemble(m, eta), n, SourceMode::ideal).error) <= 1e-12);
      }
    }
  }
}

TEST_CASE("direct click probabilities agree with inclusion-exclusion") {
  for (int m = 1; m <= 5; ++m) {
    for (int n = 1; n <= 4; ++n) {
      for (double nbar : {0.0, 0.01, 0.3}) {
        const EnsembleParams p = ensemble(m, 0.6, nbar);
        const ClickProbabilities direct = source_click_stats(p, n, SourceMode::noisy);
        const ClickProbabilities sum = via_profile(p, n, SourceMode::noisy);
        CHECK(std::abs(direct.success - sum.success) <= 1e-13);
        CHECK(std::abs(direct.error - sum.error) <= 1e-13);
      }
    }
  }
  EnsembleParams p = ensemble(3, 0.5, 0.05);
  p.storage_time = 2.0;
  p.window_length = 3.0;
  const ClickProbabilities direct = source_click_stats(p, 2, SourceMode::escape);
  const ClickProbabilities sum = via_profile(p, 2, SourceMode::escape);
  CHECK(direct.success == Approx(sum.success).epsilon(1e-11));
  CHECK(direct.error == Approx(sum.error).epsilon(1e-11));
}

TEST_CASE("tiny error probabilities keep relative precision") {
  // weak three-emitter light with little noise: R_4 is far below the
  // resolution of an alternating sum but stays positive and scales with nbar
  const double r1 = source_click_stats(ensemble(3, 1e-4, 1e-9), 3, SourceMode::noisy).error;
  const double r2 = source_click_stats(ensemble(3, 1e-4, 2e-9), 3, SourceMode::noisy).error;
  CHECK(r1 > 0.0);
  CHECK(r1 < 1e-20);
  CHECK(r2 / r1 == Approx(2.0).epsilon(1e-3));
}

TEST_CASE("weak-light approximation") {
  const ApproxClicks a1 = approx_success_error(1, 0.1, 0.0);
  CHECK(a1.success == Approx(0.05).epsilon(1e-14));
  CHECK(a1.error == 0.0);
  CHECK(source_click_stats(ensemble(1, 0.1), 1, SourceMode::ideal).success == Approx(0.05).epsilon(1e-14));
  CHECK(approx_success_error(2, 0.1, 0.0).success == Approx(2.0 / 9 * 0.01).epsilon(1e-12));
  const ApproxClicks noisy = approx_success_error(2, 0.1, 0.01);
  CHECK(noisy.error == Approx(noisy.success * 2 * 0.01).epsilon(1e-12));
  CHECK(noisy.validity_ratio == Approx(0.2));
  for (int m = 1; m <= 4; ++m) {
    const double exact = source_click_stats(ensemble(m, 1e-3), m, SourceMode::noisy).success;
    CHECK(exact / approx_success_error(m, 1e-3, 0.0).success == Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("analytic bounds") {
  CHECK(min_efficiency_analytic(1, 0.01) == Approx(0.1).epsilon(1e-12));
  CHECK(min_efficiency_analytic(1, 0.0004) == Approx(0.02).epsilon(1e-12));
  CHECK(min_efficiency_analytic(3, 0.0) == 0.0);
  CHECK(loss_tolerance_analytic(1, 0.3, 0.009) == Approx(0.1).epsilon(1e-12));
  // applying the loss to (eta, nbar) lands exactly on the efficiency bound
  for (int m = 1; m <= 4; ++m) {
    const double eta = 0.3;
    const double nbar = 0.004;
    const double t = loss_tolerance_analytic(m, eta, nbar);
    CHECK(t * eta == Approx(min_efficiency_analytic(m, t * nbar)).epsilon(1e-12));
  }
  const DurationBound b0 = max_duration_analytic(1, 0.3, 0.0, 2.0);
  CHECK(b0.detectable);
  CHECK(b0.max_window == Approx(1.0).epsilon(1e-14));
  const DurationBound b = max_duration_analytic(1, 0.3, 0.045, 1.0);
  CHECK(b.max_window == Approx(0.375).epsilon(1e-12));
  CHECK(b.quadratic_ratio == Approx(0.375 * 0.375 / 12).epsilon(1e-12));
  CHECK(b.quartic_ratio == Approx(std::pow(0.375, 4) / 1440).epsilon(1e-12));
  CHECK_FALSE(max_duration_analytic(1, 0.3, 0.5, 1.0).detectable);
}

TEST_CASE("order n = m is witnessed down to tiny efficiency without noise") {
  SearchOptions quick;
  quick.lower = 1e-2;
  const ThresholdSearch s = min_detectable_efficiency(2, 2, 0.0, quick);
  CHECK(s.outcome == ThresholdSearch::Outcome::always_witnessed);
  const ThresholdSearch lower = min_detectable_efficiency(2, 1, 0.0, quick);
  CHECK(lower.outcome == ThresholdSearch::Outcome::crossing);
  CHECK(lower.value > 0.0);
  CHECK(lower.value < 1.0);
}

TEST_CASE("single-emitter searches follow the analytic bounds") {
  const ThresholdSearch eta = min_detectable_efficiency(1, 1, 0.01);
  REQUIRE(eta.outcome == ThresholdSearch::Outcome::crossing);
  CHECK(eta.value == Approx(0.1).epsilon(0.25));
  const ThresholdSearch t = max_tolerated_loss(1, 0.3, 0.009, 1);
  REQUIRE(t.outcome == ThresholdSearch::Outcome::crossing);
  CHECK(t.value == Approx(0.1).epsilon(0.25));
  SearchOptions noiseless;
  noiseless.lower = 1e-2;
  CHECK(max_tolerated_loss(1, 0.3, 0.0, 1, noiseless).outcome ==
        ThresholdSearch::Outcome::always_witnessed);
}

TEST_CASE("efficiency and loss thresholds at low noise stay on the analytic bounds") {
  // observed gaps: eta* <= 2.9%, T* <= 1.3% at nbar = 1e-3
  for (int m = 1; m <= 2; ++m) {
    const ThresholdSearch eta = min_detectable_efficiency(m, m, 1e-3);
    REQUIRE(eta.outcome == ThresholdSearch::Outcome::crossing);
    CHECK(eta.value == Approx(min_efficiency_analytic(m, 1e-3)).epsilon(0.03));
    const ThresholdSearch t = max_tolerated_loss(m, 0.3, 1e-3, m);
    REQUIRE(t.outcome == ThresholdSearch::Outcome::crossing);
    CHECK(t.value == Approx(loss_tolerance_analytic(m, 0.3, 1e-3)).epsilon(0.015));
  }
  // three emitters at very low noise probe the deep tail of the order-3 bound
  const ThresholdSearch t3 = max_tolerated_loss(3, 0.3, 1e-4, 3);
  REQUIRE(t3.outcome == ThresholdSearch::Outcome::crossing);
  CHECK(t3.value == Approx(loss_tolerance_analytic(3, 0.3, 1e-4)).epsilon(0.01));
}

TEST_CASE("measurement duration") {
  SearchOptions bracket = duration_search_defaults();
  bracket.upper = 20.0;
  bracket.tolerance = 1e-3;
  CHECK(max_measurement_duration(1, 0.3, 0.0, 1.0, 1, bracket).outcome ==
        ThresholdSearch::Outcome::always_witnessed);
  const ThresholdSearch a = max_measurement_duration(1, 0.3, 0.002, 1.0, 1, bracket);
  const ThresholdSearch b = max_measurement_duration(1, 0.3, 0.004, 1.0, 1, bracket);
  REQUIRE(a.outcome == ThresholdSearch::Outcome::crossing);
  REQUIRE(b.outcome == ThresholdSearch::Outcome::crossing);
  CHECK(a.value > b.value);
  CHECK_THROWS(max_measurement_duration(1, 0.3, 0.002, INFINITY, 1, bracket));
}
