#include "longmix/lmm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "longmix/errors.hpp"
#include "longmix/numerics/special.hpp"

namespace longmix {

namespace {

constexpr double kStatClamp = 1e-6;
constexpr double kFdStep = 1e-4;  // on log-variance parameters

std::size_t n_variance_params(const LmmFit& fit) {
  return fit.vc.tau2_sq.has_value() ? 4 : 2;
}

bool labels_subset(const std::vector<std::string>& small, const std::vector<std::string>& big) {
  for (const auto& s : small)
    if (std::find(big.begin(), big.end(), s) == big.end()) return false;
  return true;
}

// Unconstrained reparameterization of the variance components for finite
// differences: log-Cholesky of G plus log sigma^2, with boundary components
// frozen at zero rather than differentiated.
struct VcParams {
  bool slope = false;
  bool has_tau1 = true;
  bool has_l22 = false;
  std::vector<double> theta;

  static VcParams from(const VarianceComponents& vc) {
    VcParams p;
    p.slope = vc.tau2_sq.has_value();
    const double floor = 1e-12 * std::max(vc.sigma_eps_sq, 1e-30);
    if (!p.slope) {
      p.has_tau1 = vc.tau1_sq > floor;
      if (p.has_tau1) p.theta.push_back(std::log(vc.tau1_sq));
      p.theta.push_back(std::log(vc.sigma_eps_sq));
      return p;
    }
    const double tau12 = vc.tau12.value_or(0.0);
    p.has_tau1 = vc.tau1_sq > floor;
    const double l11 = p.has_tau1 ? std::sqrt(vc.tau1_sq) : 0.0;
    const double l21 = p.has_tau1 ? tau12 / l11 : 0.0;
    const double l22_sq = *vc.tau2_sq - l21 * l21;
    p.has_l22 = l22_sq > floor;
    if (p.has_tau1) {
      p.theta.push_back(std::log(l11));
      if (p.has_l22) p.theta.push_back(l21);
    }
    if (p.has_l22) p.theta.push_back(0.5 * std::log(l22_sq));
    p.theta.push_back(std::log(vc.sigma_eps_sq));
    return p;
  }

  VarianceComponents to_vc(const std::vector<double>& t) const {
    VarianceComponents vc;
    std::size_t k = 0;
    if (!slope) {
      vc.tau1_sq = has_tau1 ? std::exp(t[k++]) : 0.0;
      vc.sigma_eps_sq = std::exp(t[k]);
      return vc;
    }
    double l11 = 0.0, l21 = 0.0, l22 = 0.0;
    if (has_tau1) {
      l11 = std::exp(t[k++]);
      if (has_l22) l21 = t[k++];
    }
    if (has_l22) l22 = std::exp(t[k++]);
    vc.tau1_sq = l11 * l11;
    vc.tau12 = l11 * l21;
    vc.tau2_sq = l21 * l21 + l22 * l22;
    vc.sigma_eps_sq = std::exp(t[k]);
    return vc;
  }
};

double coefficient_variance(const DesignMatrices& dm, const VarianceComponents& vc,
                            std::size_t j) {
  const Matrix a = gls_information(dm, vc);
  std::vector<double> ej(a.rows(), 0.0);
  ej[j] = 1.0;
  return solve_spd(a, ej)[j];
}

SatterthwaiteResult normal_fallback(double t_stat) {
  SatterthwaiteResult r;
  r.df = std::numeric_limits<double>::infinity();
  r.t = t_stat;
  r.p_value = 2.0 * (1.0 - normal_cdf(std::fabs(t_stat)));
  r.normal_approx = true;
  return r;
}

}  // namespace

LrtResult lrt(const LmmFit& null_fit, const LmmFit& alt_fit, LrtMethod method) {
  if (!labels_subset(null_fit.labels, alt_fit.labels))
    throw NotNested("lrt: null fixed effects are not a subset of the alternative's");
  if (n_variance_params(null_fit) > n_variance_params(alt_fit))
    throw NotNested("lrt: null random structure is larger than the alternative's");
  if (null_fit.criterion != alt_fit.criterion)
    throw DomainError("lrt: fits use different criteria");

  const bool fixed_differ = null_fit.labels.size() != alt_fit.labels.size();
  if (fixed_differ && null_fit.criterion != FitCriterion::ML)
    throw DomainError("lrt: fixed-effect tests require ML fits");
  if (method == LrtMethod::BoundaryMixture &&
      (fixed_differ || n_variance_params(alt_fit) != 4 || n_variance_params(null_fit) != 2))
    throw DomainError("lrt: boundary mixture applies only to the random-slope test");

  const double ln = null_fit.criterion == FitCriterion::ML ? null_fit.loglik_ml
                                                           : null_fit.loglik_reml;
  const double la = alt_fit.criterion == FitCriterion::ML ? alt_fit.loglik_ml
                                                          : alt_fit.loglik_reml;
  double stat = 2.0 * (la - ln);
  if (stat < 0.0) {
    if (stat < -kStatClamp)
      throw ConvergenceFailure("lrt: alternative fit fell below the null", 0, stat);
    stat = 0.0;
  }

  LrtResult result;
  result.statistic = stat;
  result.method = method;
  if (method == LrtMethod::BoundaryMixture) {
    result.df = 0.0;
    result.p_value = 0.5 * chi2_survival(stat, 1.0) + 0.5 * chi2_survival(stat, 2.0);
    return result;
  }

  const double df =
      static_cast<double>(alt_fit.labels.size() + n_variance_params(alt_fit)) -
      static_cast<double>(null_fit.labels.size() + n_variance_params(null_fit));
  result.df = df;
  result.p_value = df > 0.0 ? chi2_survival(stat, df) : 1.0;
  return result;
}

SatterthwaiteResult satterthwaite_test(const LmmFit& fit, const DesignMatrices& dm,
                                       std::size_t coefficient_index) {
  if (fit.criterion != FitCriterion::REML)
    throw DomainError("satterthwaite_test: requires a REML fit");
  if (!fit.converged) throw DomainError("satterthwaite_test: fit did not converge");
  if (coefficient_index >= fit.beta.size())
    throw DomainError("satterthwaite_test: coefficient index out of range");

  const std::size_t j = coefficient_index;
  const double se_sq = fit.cov_beta(j, j);
  const double t_stat = fit.beta[j] / std::sqrt(se_sq);

  const VcParams params = VcParams::from(fit.vc);
  const std::size_t k = params.theta.size();

  try {
    // Gradient of the coefficient variance in theta.
    std::vector<double> grad(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> tp = params.theta, tm = params.theta;
      tp[i] += kFdStep;
      tm[i] -= kFdStep;
      const double vp = coefficient_variance(dm, params.to_vc(tp), j);
      const double vm = coefficient_variance(dm, params.to_vc(tm), j);
      grad[i] = (vp - vm) / (2.0 * kFdStep);
    }

    // Observed REML information: negative Hessian by central differences.
    auto reml_at = [&](const std::vector<double>& t) {
      return profile_loglik(dm, params.to_vc(t), FitCriterion::REML);
    };
    const double f0 = reml_at(params.theta);
    Matrix neg_hess(k, k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      std::vector<double> tp = params.theta, tm = params.theta;
      tp[a] += kFdStep;
      tm[a] -= kFdStep;
      neg_hess(a, a) = -(reml_at(tp) - 2.0 * f0 + reml_at(tm)) / (kFdStep * kFdStep);
      for (std::size_t b = a + 1; b < k; ++b) {
        std::vector<double> tpp = params.theta, tpm = params.theta, tmp = params.theta,
                            tmm = params.theta;
        tpp[a] += kFdStep;
        tpp[b] += kFdStep;
        tpm[a] += kFdStep;
        tpm[b] -= kFdStep;
        tmp[a] -= kFdStep;
        tmp[b] += kFdStep;
        tmm[a] -= kFdStep;
        tmm[b] -= kFdStep;
        const double mixed = (reml_at(tpp) - reml_at(tpm) - reml_at(tmp) + reml_at(tmm)) /
                             (4.0 * kFdStep * kFdStep);
        neg_hess(a, b) = -mixed;
        neg_hess(b, a) = -mixed;
      }
    }

    const std::vector<double> hg = solve_spd(neg_hess, grad);
    double denom = 0.0;
    for (std::size_t i = 0; i < k; ++i) denom += grad[i] * hg[i];
    const double df = 2.0 * se_sq * se_sq / denom;
    if (!std::isfinite(df) || df <= 0.0) return normal_fallback(t_stat);

    SatterthwaiteResult r;
    r.df = df;
    r.t = t_stat;
    r.p_value = 2.0 * student_t_survival(std::fabs(t_stat), df);
    r.normal_approx = false;
    return r;
  } catch (const NotPositiveDefinite&) {
    return normal_fallback(t_stat);
  } catch (const DomainError&) {
    return normal_fallback(t_stat);
  }
}

}  // namespace longmix
