#pragma once

#include <cstddef>

#include "longmix/lmm/lmm.hpp"

namespace longmix {

enum class LrtMethod { Standard, BoundaryMixture };

struct LrtResult {
  double statistic = 0.0;  // 2 (loglik_alt - loglik_null), clamped at 0
  double df = 0.0;         // parameter-count difference (standard method)
  double p_value = 1.0;
  LrtMethod method = LrtMethod::Standard;
};

// Likelihood-ratio test of nested fits. Standard: p = P(chi2_df > stat).
// BoundaryMixture (random-slope test): p = chi2_1 and chi2_2 survival
// averaged with equal weights. Fixed-effect differences require ML fits;
// negative statistics within 1e-6 clamp to zero, larger ones throw
// ConvergenceFailure.
LrtResult lrt(const LmmFit& null_fit, const LmmFit& alt_fit, LrtMethod method);

struct SatterthwaiteResult {
  double df = 0.0;
  double t = 0.0;
  double p_value = 1.0;
  bool normal_approx = false;  // Hessian was singular, normal fallback used
};

// Satterthwaite t-test for one fixed effect of a converged REML fit:
// df = 2 (c^T V_beta c)^2 / (g^T A g), with g the finite-difference gradient
// of the coefficient variance in the log-variance parameters and A the
// inverse negative REML Hessian in the same parameters.
SatterthwaiteResult satterthwaite_test(const LmmFit& fit, const DesignMatrices& dm,
                                       std::size_t coefficient_index);

}  // namespace longmix
