#include <doctest.h>

#include <cmath>

#include "longmix/lmm/effects.hpp"

using namespace longmix;

// Reference coefficients: CT-Sum -0.088, CT-Sum:GA 0.005 (base model) and
// GA 0.032, hinge 0.127, CT-Sum:GA 0.005 (piecewise model).

TEST_CASE("trauma effect percentages at the reported gestational ages") {
  CHECK(effect_percent(-0.088, 0.005, 14.0, 1.0).percent_change ==
        doctest::Approx(-1.8).epsilon(0.15 / 1.8));
  CHECK(effect_percent(-0.088, 0.005, 26.7, 1.0).percent_change ==
        doctest::Approx(4.7).epsilon(0.15 / 4.7));
  CHECK(effect_percent(-0.088, 0.005, 40.0, 1.0).percent_change ==
        doctest::Approx(11.9).epsilon(0.15 / 11.9));
  CHECK(effect_percent(-0.088, 0.005, 40.0, 1.2).percent_change ==
        doctest::Approx(14.4).epsilon(0.15 / 14.4));
}

TEST_CASE("zero coefficients give a zero percent change") {
  const EffectReport r = effect_percent(0.0, 0.0, 33.0, 2.0);
  CHECK(r.log_effect == 0.0);
  CHECK(r.percent_change == 0.0);
}

TEST_CASE("percent change follows 100(exp(log effect) - 1) exactly") {
  const EffectReport r = effect_percent(-0.09, 0.004, 25.0, 1.5);
  CHECK(r.log_effect == doctest::Approx(1.5 * (-0.09 + 0.004 * 25.0)).epsilon(1e-14));
  CHECK(r.percent_change == doctest::Approx(100.0 * (std::exp(r.log_effect) - 1.0)).epsilon(1e-14));
}

TEST_CASE("effect percent is monotone in gestational age when the interaction is positive") {
  double prev = -1e9;
  for (double ga = 14.0; ga <= 40.0; ga += 0.5) {
    const double cur = effect_percent(-0.088, 0.005, ga, 1.0).percent_change;
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("piecewise weekly growth at the reported trauma levels") {
  auto pct = [](double ct, GaSegment seg) {
    return piecewise_slope_percent(0.032, 0.127, 0.005, ct, seg).percent_per_week;
  };
  CHECK(pct(1.2, GaSegment::Before) == doctest::Approx(3.8).epsilon(0.15 / 3.8));
  CHECK(pct(1.2, GaSegment::After) == doctest::Approx(17.9).epsilon(0.15 / 17.9));
  CHECK(pct(1.0, GaSegment::Before) == doctest::Approx(3.8).epsilon(0.15 / 3.8));
  CHECK(pct(1.0, GaSegment::After) == doctest::Approx(17.8).epsilon(0.15 / 17.8));
  CHECK(pct(0.0, GaSegment::Before) == doctest::Approx(3.3).epsilon(0.15 / 3.3));
  CHECK(pct(0.0, GaSegment::After) == doctest::Approx(17.2).epsilon(0.15 / 17.2));
}

TEST_CASE("piecewise slope with zero coefficients is flat") {
  CHECK(piecewise_slope_percent(0.0, 0.0, 0.0, 1.2, GaSegment::Before).percent_per_week == 0.0);
  CHECK(piecewise_slope_percent(0.0, 0.0, 0.0, 0.7, GaSegment::After).percent_per_week == 0.0);
}
