#include "longmix/lmm/effects.hpp"

#include <cmath>

namespace longmix {

EffectReport effect_percent(double beta_ct, double beta_ctga, double ga, double ct_delta) {
  EffectReport r;
  r.ga = ga;
  r.ct_delta = ct_delta;
  r.log_effect = ct_delta * (beta_ct + beta_ctga * ga);
  r.percent_change = 100.0 * (std::exp(r.log_effect) - 1.0);
  return r;
}

SlopeReport piecewise_slope_percent(double beta_ga, double beta_hinge, double beta_ctga,
                                    double ct, GaSegment segment) {
  SlopeReport r;
  r.ct = ct;
  r.segment = segment;
  r.log_slope = beta_ga + ct * beta_ctga + (segment == GaSegment::After ? beta_hinge : 0.0);
  r.percent_per_week = 100.0 * (std::exp(r.log_slope) - 1.0);
  return r;
}

}  // namespace longmix
