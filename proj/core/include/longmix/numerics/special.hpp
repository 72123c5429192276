#pragma once

namespace longmix {

// Regularized incomplete gamma P(a, x) and Q(a, x) = 1 - P(a, x).
// Series expansion for x < a + 1, continued fraction otherwise; both iterate
// to a 1e-12 termination bound.
double lower_gamma_regularized(double a, double x);
double upper_gamma_regularized(double a, double x);

// P(chi2_df > x). DomainError for x < 0 or df <= 0.
double chi2_survival(double x, double df);

double normal_cdf(double x);

// Inverse of normal_cdf on (0, 1); DomainError at the endpoints.
double normal_quantile(double p);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta_regularized(double a, double b, double x);

// P(T_df > t) for Student's t. Accepts any real t.
double student_t_survival(double t, double df);

}  // namespace longmix
