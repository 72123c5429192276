#include "longmix/lmm/lmm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "longmix/errors.hpp"

namespace longmix {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)
constexpr double kObjTol = 1e-8;  // relative objective change at convergence

// 2x2 lower-triangular factor of Psi = G / sigma^2; column 2 is zero for the
// random-intercept model.
struct PsiFactor {
  std::size_t q = 1;
  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
};

struct SubjectStats {
  std::size_t n = 0;
  Matrix xtx;                               // p x p
  std::vector<double> xty;                  // p
  std::array<std::vector<double>, 2> ztx;   // q rows of Z^T X, each length p
  std::array<double, 2> zty{};
  std::array<std::array<double, 2>, 2> ztz{};
  double yty = 0.0;
};

struct FitWorkspace {
  std::size_t p = 0, n = 0, q = 1;
  std::vector<SubjectStats> subjects;
};

FitWorkspace build_workspace(const DesignMatrices& dm) {
  FitWorkspace ws;
  ws.p = dm.n_fixed();
  ws.n = dm.n_obs();
  ws.q = dm.random_slope() ? 2 : 1;
  ws.subjects.resize(dm.n_subjects());
  for (std::size_t si = 0; si < dm.n_subjects(); ++si) {
    const auto [begin, end] = dm.subject_rows[si];
    SubjectStats& st = ws.subjects[si];
    st.n = end - begin;
    st.xtx = Matrix(ws.p, ws.p, 0.0);
    st.xty.assign(ws.p, 0.0);
    for (auto& row : st.ztx) row.assign(ws.p, 0.0);
    for (std::size_t r = begin; r < end; ++r) {
      const double yr = dm.y[r];
      const double z2 = dm.ga[r];  // slope regressor
      st.yty += yr * yr;
      st.zty[0] += yr;
      st.ztz[0][0] += 1.0;
      if (ws.q == 2) {
        st.zty[1] += z2 * yr;
        st.ztz[0][1] += z2;
        st.ztz[1][0] += z2;
        st.ztz[1][1] += z2 * z2;
      }
      for (std::size_t a = 0; a < ws.p; ++a) {
        const double xa = dm.x(r, a);
        st.xty[a] += xa * yr;
        st.ztx[0][a] += xa;
        if (ws.q == 2) st.ztx[1][a] += z2 * xa;
        for (std::size_t b = a; b < ws.p; ++b) st.xtx(a, b) += xa * dm.x(r, b);
      }
    }
    for (std::size_t a = 0; a < ws.p; ++a)
      for (std::size_t b = 0; b < a; ++b) st.xtx(a, b) = st.xtx(b, a);
  }
  return ws;
}

struct ProfiledEval {
  double objective = 0.0;  // criterion value at the profiled sigma^2
  double rss = 0.0;        // weighted residual sum of squares
  double logdet_w = 0.0;   // sum of log|I + Z Psi Z^T| over subjects
  double logdet_a = 0.0;   // log|X^T W^-1 X|
  std::vector<double> beta;
  Matrix a;                // X^T W^-1 X
};

// Objective for one Psi factor with sigma^2 profiled out in closed form.
// Uses the Woodbury identity through the q x q capacitance M = I + L^T Z^T Z L.
ProfiledEval eval_profiled(const FitWorkspace& ws, const PsiFactor& f,
                           FitCriterion criterion) {
  const std::size_t p = ws.p;
  ProfiledEval ev;
  ev.a = Matrix(p, p, 0.0);
  std::vector<double> u(p, 0.0);
  double qyy = 0.0;

  std::array<std::vector<double>, 2> cx;  // L^T Z^T X rows
  for (auto& row : cx) row.assign(p, 0.0);

  for (const SubjectStats& st : ws.subjects) {
    // B = L^T (Z^T Z) L, M = I + B
    const double z00 = st.ztz[0][0], z01 = st.ztz[0][1], z11 = st.ztz[1][1];
    double b00, b01, b11;
    b00 = f.l11 * (z00 * f.l11 + z01 * f.l21) + f.l21 * (z01 * f.l11 + z11 * f.l21);
    b01 = f.l22 * (f.l11 * z01 + f.l21 * z11);
    b11 = f.l22 * f.l22 * z11;
    if (f.q == 1) {
      b00 = f.l11 * f.l11 * z00;
      b01 = 0.0;
      b11 = 0.0;
    }
    const double m00 = 1.0 + b00, m01 = b01, m11 = 1.0 + b11;
    const double det = m00 * m11 - m01 * m01;
    const double i00 = m11 / det, i01 = -m01 / det, i11 = m00 / det;
    ev.logdet_w += std::log(det);

    // cx = L^T Z^T X, cy = L^T Z^T y
    for (std::size_t a = 0; a < p; ++a) {
      cx[0][a] = f.l11 * st.ztx[0][a] + f.l21 * st.ztx[1][a];
      cx[1][a] = f.l22 * st.ztx[1][a];
    }
    const double cy0 = f.l11 * st.zty[0] + f.l21 * st.zty[1];
    const double cy1 = f.l22 * st.zty[1];

    // Minv * cy and Minv * cx
    const double vy0 = i00 * cy0 + i01 * cy1;
    const double vy1 = i01 * cy0 + i11 * cy1;
    qyy += st.yty - (cy0 * vy0 + cy1 * vy1);
    for (std::size_t a = 0; a < p; ++a) {
      const double va0 = i00 * cx[0][a] + i01 * cx[1][a];
      const double va1 = i01 * cx[0][a] + i11 * cx[1][a];
      u[a] += st.xty[a] - (cx[0][a] * vy0 + cx[1][a] * vy1);
      for (std::size_t b = a; b < p; ++b)
        ev.a(a, b) += st.xtx(a, b) - (cx[0][b] * va0 + cx[1][b] * va1);
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < a; ++b) ev.a(a, b) = ev.a(b, a);

  const Matrix chol_a = cholesky(ev.a);
  ev.logdet_a = log_det_from_cholesky(chol_a);
  ev.beta = solve_lower_transpose(chol_a, solve_lower(chol_a, u));

  double rss = qyy;
  for (std::size_t a = 0; a < p; ++a) rss -= ev.beta[a] * u[a];
  ev.rss = std::max(rss, 1e-300);

  const double n = static_cast<double>(ws.n);
  if (criterion == FitCriterion::ML) {
    const double s2 = ev.rss / n;
    ev.objective = -0.5 * (n * kLog2Pi + n * std::log(s2) + ev.logdet_w + n);
  } else {
    const double np = n - static_cast<double>(p);
    const double s2 = ev.rss / np;
    // logdet of X^T V^-1 X = logdet_a - p log sigma^2; terms arranged so the
    // REML - ML convention delta is -log|X^T V^-1 X|/2 + (p/2) log(2*pi).
    ev.objective =
        -0.5 * (np * kLog2Pi + np * std::log(s2) + ev.logdet_w + ev.logdet_a + np);
  }
  return ev;
}

struct OptimumTracker {
  double best_obj = -std::numeric_limits<double>::infinity();
  PsiFactor best_factor;
  std::size_t iterations = 0;
  bool converged = false;

  void offer(double obj, const PsiFactor& f) {
    if (obj > best_obj) {
      best_obj = obj;
      best_factor = f;
    }
  }
};

// Analytic d(objective)/d(phi) for the random-intercept ratio model,
// phi = log(lambda). Used to polish the golden-section bracket to machine
// precision; comparison-based search alone cannot pass the 1e-10
// permutation-invariance bound.
double ratio_objective_derivative(const FitWorkspace& ws, double phi,
                                  FitCriterion criterion) {
  const double lam = std::exp(phi);
  const std::size_t p = ws.p;
  Matrix a(p, p, 0.0);
  std::vector<double> u(p, 0.0), du(p, 0.0);
  double qyy = 0.0, dqyy = 0.0, dlog_w = 0.0;

  for (const SubjectStats& st : ws.subjects) {
    const double n_i = st.ztz[0][0];
    const double denom = 1.0 + n_i * lam;
    const double c = lam / denom;
    const double cp = 1.0 / (denom * denom);  // d c / d lambda
    const double t_i = st.zty[0];
    qyy += st.yty - c * t_i * t_i;
    dqyy -= cp * t_i * t_i;
    dlog_w += n_i / denom;
    for (std::size_t j = 0; j < p; ++j) {
      const double sj = st.ztx[0][j];
      u[j] += st.xty[j] - c * t_i * sj;
      du[j] -= cp * t_i * sj;
      for (std::size_t k = j; k < p; ++k) a(j, k) += st.xtx(j, k) - c * sj * st.ztx[0][k];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) a(j, k) = a(k, j);

  const Matrix chol_a = cholesky(a);
  const std::vector<double> beta = solve_lower_transpose(chol_a, solve_lower(chol_a, u));

  double rss = qyy, beta_du = 0.0, beta_da_beta = 0.0, dlogdet_a = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    rss -= beta[j] * u[j];
    beta_du += beta[j] * du[j];
  }
  for (const SubjectStats& st : ws.subjects) {
    const double n_i = st.ztz[0][0];
    const double cp = 1.0 / ((1.0 + n_i * lam) * (1.0 + n_i * lam));
    double s_beta = 0.0;
    for (std::size_t j = 0; j < p; ++j) s_beta += st.ztx[0][j] * beta[j];
    beta_da_beta -= cp * s_beta * s_beta;
    std::vector<double> s_i(st.ztx[0]);
    const std::vector<double> ainv_s = solve_lower_transpose(chol_a, solve_lower(chol_a, s_i));
    double s_ainv_s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s_ainv_s += st.ztx[0][j] * ainv_s[j];
    dlogdet_a -= cp * s_ainv_s;
  }
  const double drss = dqyy - 2.0 * beta_du + beta_da_beta;
  const double dof = criterion == FitCriterion::ML
                         ? static_cast<double>(ws.n)
                         : static_cast<double>(ws.n) - static_cast<double>(p);
  double deriv = dof * drss / rss + dlog_w;
  if (criterion == FitCriterion::REML) deriv += dlogdet_a;
  return -0.5 * lam * deriv;
}

// 1-D search over phi = log(lambda), lambda = tau1^2/sigma^2.
void optimize_ratio(const FitWorkspace& ws, FitCriterion criterion,
                    std::size_t iter_cap, OptimumTracker& opt) {
  auto objective = [&](double phi) {
    PsiFactor f;
    f.q = 1;
    f.l11 = std::exp(0.5 * phi);
    return eval_profiled(ws, f, criterion).objective;
  };

  // Exact boundary lambda = 0.
  {
    PsiFactor zero;
    zero.q = 1;
    zero.l11 = 0.0;
    opt.offer(eval_profiled(ws, zero, criterion).objective, zero);
  }

  double best_phi = -14.0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (double phi = -14.0; phi <= 10.0 + 1e-9; phi += 1.0) {
    const double v = objective(phi);
    ++opt.iterations;
    if (v > best_val) {
      best_val = v;
      best_phi = phi;
    }
  }

  // Golden-section within the bracketing grid cells.
  double a = best_phi - 1.0, b = best_phi + 1.0;
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = objective(c), fd = objective(d);
  std::size_t iters = 0;
  while (b - a > 1e-10 && iters < iter_cap) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = objective(d);
    }
    ++iters;
  }
  opt.iterations += iters;
  opt.converged = iters < iter_cap;

  double phi = 0.5 * (a + b);

  // Newton on the analytic stationarity equation.
  const double h = 1e-5;
  for (int it = 0; it < 40; ++it) {
    const double g = ratio_objective_derivative(ws, phi, criterion);
    const double gp = (ratio_objective_derivative(ws, phi + h, criterion) -
                       ratio_objective_derivative(ws, phi - h, criterion)) /
                      (2.0 * h);
    opt.iterations += 3;
    if (!(gp < 0.0)) break;  // needs a local maximum
    const double step = g / gp;
    const double cand = phi - step;
    if (cand < a - 1.0 || cand > b + 1.0) break;
    phi = cand;
    if (std::fabs(step) < 1e-13) break;
  }

  PsiFactor f;
  f.q = 1;
  f.l11 = std::exp(0.5 * phi);
  opt.offer(objective(phi), f);
}

// Nelder-Mead over theta = (log l11, l21, log l22) for the intercept+slope
// covariance factor.
void nelder_mead(const FitWorkspace& ws, FitCriterion criterion,
                 const std::array<double, 3>& start, std::size_t iter_cap,
                 OptimumTracker& opt) {
  auto to_factor = [](const std::array<double, 3>& t) {
    PsiFactor f;
    f.q = 2;
    f.l11 = std::exp(t[0]);
    f.l21 = t[1];
    f.l22 = std::exp(t[2]);
    return f;
  };
  auto objective = [&](const std::array<double, 3>& t) {
    return -eval_profiled(ws, to_factor(t), criterion).objective;  // minimized
  };

  constexpr std::size_t dim = 3;
  std::array<std::array<double, 3>, dim + 1> vx;
  std::array<double, dim + 1> fx;
  vx[0] = start;
  fx[0] = objective(vx[0]);
  for (std::size_t i = 0; i < dim; ++i) {
    vx[i + 1] = start;
    vx[i + 1][i] += 0.5;
    fx[i + 1] = objective(vx[i + 1]);
  }

  std::size_t iters = 0;
  for (; iters < iter_cap; ++iters) {
    std::array<std::size_t, dim + 1> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](std::size_t u, std::size_t v) { return fx[u] < fx[v]; });
    const std::size_t lo = order[0], hi = order[dim], second_hi = order[dim - 1];

    if (std::fabs(fx[hi] - fx[lo]) <= kObjTol * (std::fabs(fx[lo]) + 1.0)) {
      ++iters;
      break;
    }

    std::array<double, 3> centroid{};
    for (std::size_t i = 0; i <= dim; ++i) {
      if (i == hi) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += vx[i][k] / dim;
    }
    auto blend = [&](double coef) {
      std::array<double, 3> out;
      for (std::size_t k = 0; k < dim; ++k)
        out[k] = centroid[k] + coef * (vx[hi][k] - centroid[k]);
      return out;
    };

    const auto reflect = blend(-1.0);
    const double f_reflect = objective(reflect);
    if (f_reflect < fx[lo]) {
      const auto expand = blend(-2.0);
      const double f_expand = objective(expand);
      if (f_expand < f_reflect) {
        vx[hi] = expand;
        fx[hi] = f_expand;
      } else {
        vx[hi] = reflect;
        fx[hi] = f_reflect;
      }
    } else if (f_reflect < fx[second_hi]) {
      vx[hi] = reflect;
      fx[hi] = f_reflect;
    } else {
      const auto contract = blend(f_reflect < fx[hi] ? -0.5 : 0.5);
      const double f_contract = objective(contract);
      if (f_contract < std::min(f_reflect, fx[hi])) {
        vx[hi] = contract;
        fx[hi] = f_contract;
      } else {
        for (std::size_t i = 0; i <= dim; ++i) {
          if (i == lo) continue;
          for (std::size_t k = 0; k < dim; ++k)
            vx[i][k] = vx[lo][k] + 0.5 * (vx[i][k] - vx[lo][k]);
          fx[i] = objective(vx[i]);
        }
      }
    }
  }
  opt.iterations += iters;
  if (iters < iter_cap) opt.converged = true;

  std::size_t lo = 0;
  for (std::size_t i = 1; i <= dim; ++i)
    if (fx[i] < fx[lo]) lo = i;
  opt.offer(-fx[lo], to_factor(vx[lo]));
}

}  // namespace

double profile_loglik(const DesignMatrices& dm, const VarianceComponents& vc,
                      FitCriterion criterion) {
  const bool slope = dm.random_slope();
  if (slope != vc.tau2_sq.has_value())
    throw DomainError("profile_loglik: variance components do not match the random design");
  if (vc.tau1_sq < 0.0 || vc.sigma_eps_sq < 0.0)
    throw DomainError("profile_loglik: negative variance");
  const double tau12 = vc.tau12.value_or(0.0);
  if (slope) {
    if (*vc.tau2_sq < 0.0) throw DomainError("profile_loglik: negative slope variance");
    if (vc.tau1_sq * *vc.tau2_sq - tau12 * tau12 < -1e-12)
      throw DomainError("profile_loglik: random-effect covariance not PSD");
  }

  const std::size_t p = dm.n_fixed();
  const double n = static_cast<double>(dm.n_obs());
  Matrix a(p, p, 0.0);
  std::vector<double> u(p, 0.0);
  double qyy = 0.0;
  double logdet_v = 0.0;

  for (std::size_t si = 0; si < dm.n_subjects(); ++si) {
    const auto [begin, end] = dm.subject_rows[si];
    const std::size_t ni = end - begin;
    Matrix v(ni, ni, 0.0);
    for (std::size_t r = 0; r < ni; ++r) {
      for (std::size_t s = 0; s < ni; ++s) {
        double cov = vc.tau1_sq;
        if (slope) {
          const double g1 = dm.ga[begin + r], g2 = dm.ga[begin + s];
          cov += tau12 * (g1 + g2) + *vc.tau2_sq * g1 * g2;
        }
        v(r, s) = cov;
      }
      v(r, r) += vc.sigma_eps_sq;
    }
    const Matrix l = cholesky(v);
    logdet_v += log_det_from_cholesky(l);

    // V^-1 applied to [X_i y_i] via the factor.
    std::vector<double> col(ni);
    std::vector<double> vy;
    for (std::size_t r = 0; r < ni; ++r) col[r] = dm.y[begin + r];
    vy = solve_lower_transpose(l, solve_lower(l, col));
    for (std::size_t r = 0; r < ni; ++r) qyy += dm.y[begin + r] * vy[r];

    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t r = 0; r < ni; ++r) col[r] = dm.x(begin + r, j);
      const std::vector<double> vxj = solve_lower_transpose(l, solve_lower(l, col));
      for (std::size_t r = 0; r < ni; ++r) {
        u[j] += dm.x(begin + r, j) * vy[r];
        for (std::size_t k = j; k < p; ++k) a(j, k) += dm.x(begin + r, k) * vxj[r];
      }
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) a(j, k) = a(k, j);

  const Matrix chol_a = cholesky(a);
  const std::vector<double> beta = solve_lower_transpose(chol_a, solve_lower(chol_a, u));
  double quad = qyy;
  for (std::size_t j = 0; j < p; ++j) quad -= beta[j] * u[j];

  const double ml = -0.5 * (n * kLog2Pi + logdet_v + quad);
  if (criterion == FitCriterion::ML) return ml;
  return ml - 0.5 * log_det_from_cholesky(chol_a) +
         0.5 * static_cast<double>(p) * kLog2Pi;
}

Matrix gls_information(const DesignMatrices& dm, const VarianceComponents& vc) {
  const bool slope = dm.random_slope();
  if (slope != vc.tau2_sq.has_value())
    throw DomainError("gls_information: variance components do not match the random design");
  const double tau12 = vc.tau12.value_or(0.0);
  const std::size_t p = dm.n_fixed();
  Matrix a(p, p, 0.0);
  for (std::size_t si = 0; si < dm.n_subjects(); ++si) {
    const auto [begin, end] = dm.subject_rows[si];
    const std::size_t ni = end - begin;
    Matrix v(ni, ni, 0.0);
    for (std::size_t r = 0; r < ni; ++r) {
      for (std::size_t s = 0; s < ni; ++s) {
        double cov = vc.tau1_sq;
        if (slope) {
          const double g1 = dm.ga[begin + r], g2 = dm.ga[begin + s];
          cov += tau12 * (g1 + g2) + *vc.tau2_sq * g1 * g2;
        }
        v(r, s) = cov;
      }
      v(r, r) += vc.sigma_eps_sq;
    }
    const Matrix l = cholesky(v);
    std::vector<double> col(ni);
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t r = 0; r < ni; ++r) col[r] = dm.x(begin + r, j);
      const std::vector<double> vxj = solve_lower_transpose(l, solve_lower(l, col));
      for (std::size_t r = 0; r < ni; ++r)
        for (std::size_t k = j; k < p; ++k) a(j, k) += dm.x(begin + r, k) * vxj[r];
    }
  }
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t k = 0; k < j; ++k) a(j, k) = a(k, j);
  return a;
}

LmmFit fit_lmm(const DesignMatrices& dm, FitCriterion criterion,
               std::size_t max_iterations) {
  const std::size_t p = dm.n_fixed();
  const std::size_t n_vc = dm.random_slope() ? 4 : 2;
  if (dm.n_obs() <= p + n_vc)
    throw ValidationError("fit_lmm: too few observations for " + std::to_string(p) +
                          " fixed effects and " + std::to_string(n_vc) +
                          " variance parameters");

  const FitWorkspace ws = build_workspace(dm);
  OptimumTracker opt;

  if (!dm.random_slope()) {
    optimize_ratio(ws, criterion, max_iterations, opt);
  } else {
    // The 1-D ratio optimum seeds both the boundary candidate and the
    // Nelder-Mead starts.
    OptimumTracker ratio;
    optimize_ratio(ws, criterion, max_iterations, ratio);
    opt.iterations += ratio.iterations;
    PsiFactor boundary = ratio.best_factor;
    boundary.q = 2;
    boundary.l21 = 0.0;
    boundary.l22 = 0.0;
    opt.offer(eval_profiled(ws, boundary, criterion).objective, boundary);
    opt.converged = ratio.converged;

    double mean_ga_sq = 0.0;
    for (const SubjectStats& st : ws.subjects) mean_ga_sq += st.ztz[1][1];
    mean_ga_sq /= static_cast<double>(ws.n);

    const double lam = std::max(boundary.l11 * boundary.l11, 1e-4);
    const std::array<std::array<double, 3>, 3> starts = {{
        {0.5 * std::log(lam), 0.0, -15.0},
        {0.5 * std::log(lam / 2.0), 0.0, 0.5 * std::log(lam / (2.0 * mean_ga_sq))},
        {0.5 * std::log(0.5), 0.0, 0.5 * std::log(0.02)},
    }};
    for (const auto& start : starts) nelder_mead(ws, criterion, start, max_iterations, opt);
  }

  const PsiFactor f = opt.best_factor;
  const ProfiledEval ev = eval_profiled(ws, f, criterion);

  LmmFit fit;
  fit.spec = dm.spec;
  fit.criterion = criterion;
  fit.labels = dm.labels;
  fit.beta = ev.beta;
  fit.converged = opt.converged;
  fit.iterations = opt.iterations;
  fit.n_obs = dm.n_obs();
  fit.n_subjects = dm.n_subjects();

  const double denom = criterion == FitCriterion::ML
                           ? static_cast<double>(ws.n)
                           : static_cast<double>(ws.n) - static_cast<double>(p);
  const double sigma2 = ev.rss / denom;
  fit.vc.sigma_eps_sq = sigma2;
  const double psi00 = f.l11 * f.l11;
  const double psi10 = f.l11 * f.l21;
  const double psi11 = f.l21 * f.l21 + f.l22 * f.l22;
  fit.vc.tau1_sq = sigma2 * psi00;
  if (dm.random_slope()) {
    fit.vc.tau12 = sigma2 * psi10;
    fit.vc.tau2_sq = sigma2 * psi11;
  }

  // cov(beta) = sigma^2 (X^T W^-1 X)^-1
  fit.cov_beta = solve_spd(ev.a, Matrix::identity(p));
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) fit.cov_beta(i, j) *= sigma2;

  // BLUPs: b_i = Psi (w - Z^T Z L M^-1 L^T w), w = Z^T (y_i - X_i beta).
  const std::size_t q = dm.random_slope() ? 2 : 1;
  fit.blups = Matrix(dm.n_subjects(), q, 0.0);
  for (std::size_t si = 0; si < dm.n_subjects(); ++si) {
    const SubjectStats& st = ws.subjects[si];
    double w0 = st.zty[0], w1 = st.zty[1];
    for (std::size_t a = 0; a < p; ++a) {
      w0 -= st.ztx[0][a] * fit.beta[a];
      w1 -= st.ztx[1][a] * fit.beta[a];
    }
    const double z00 = st.ztz[0][0], z01 = st.ztz[0][1], z11 = st.ztz[1][1];
    double b00 = f.l11 * (z00 * f.l11 + z01 * f.l21) + f.l21 * (z01 * f.l11 + z11 * f.l21);
    double b01 = f.l22 * (f.l11 * z01 + f.l21 * z11);
    double b11 = f.l22 * f.l22 * z11;
    if (f.q == 1) {
      b00 = f.l11 * f.l11 * z00;
      b01 = 0.0;
      b11 = 0.0;
    }
    const double m00 = 1.0 + b00, m01 = b01, m11 = 1.0 + b11;
    const double det = m00 * m11 - m01 * m01;
    // t = L M^-1 L^T w
    const double c0 = f.l11 * w0 + f.l21 * w1;
    const double c1 = f.l22 * w1;
    const double v0 = (m11 * c0 - m01 * c1) / det;
    const double v1 = (-m01 * c0 + m00 * c1) / det;
    const double t0 = f.l11 * v0;
    const double t1 = f.l21 * v0 + f.l22 * v1;
    const double r0 = w0 - (z00 * t0 + z01 * t1);
    const double r1 = w1 - (z01 * t0 + z11 * t1);
    fit.blups(si, 0) = psi00 * r0 + psi10 * r1;
    if (q == 2) fit.blups(si, 1) = psi10 * r0 + psi11 * r1;
  }

  fit.loglik_ml = profile_loglik(dm, fit.vc, FitCriterion::ML);
  fit.loglik_reml = profile_loglik(dm, fit.vc, FitCriterion::REML);
  return fit;
}

}  // namespace longmix
