#pragma once

namespace longmix {

// Percentage change in median pCRH for a trauma-count difference at a given
// gestational age: percent = 100 (exp(ct_delta (beta_ct + beta_ctga ga)) - 1).
struct EffectReport {
  double ga = 0.0;
  double ct_delta = 0.0;
  double log_effect = 0.0;
  double percent_change = 0.0;
};

EffectReport effect_percent(double beta_ct, double beta_ctga, double ga, double ct_delta);

enum class GaSegment { Before, After };

// Weekly percentage growth of median pCRH on either side of the knot:
// log slope = beta_ga + ct * beta_ctga, plus beta_hinge after the knot.
struct SlopeReport {
  double ct = 0.0;
  GaSegment segment = GaSegment::Before;
  double log_slope = 0.0;
  double percent_per_week = 0.0;
};

SlopeReport piecewise_slope_percent(double beta_ga, double beta_hinge, double beta_ctga,
                                    double ct, GaSegment segment);

}  // namespace longmix
