#include "sparseimg/solver.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace sparseimg {

CVector complex_soft_threshold(const CVector& x, double t) {
  CVector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double m = std::abs(x[i]);
    out[i] = m > t ? x[i] * ((m - t) / m) : cdouble(0.0, 0.0);
  }
  return out;
}

namespace {

double l1_norm(const CVector& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::abs(x[i]);
  return s;
}

void finalize(RecoveryResult& res, double threshold_fraction) {
  res.rho_thresholded = threshold(res.rho_star, threshold_fraction);
}

struct QuadraticModel {
  std::function<CVector(const CVector&)> apply_gram;
  CVector corr;      // A^H d
  double d_norm_sq;  // ||d||^2
  int n;
};

double power_iteration_lmax(const QuadraticModel& model, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(model.n);
  for (int i = 0; i < model.n; ++i) v[i] = cdouble(gauss(rng), gauss(rng));
  v /= v.norm();
  double lmax = 1.0;
  for (int it = 0; it < 50; ++it) {
    CVector w = model.apply_gram(v);
    const double nw = w.norm();
    if (nw == 0.0) return 1.0;
    const double prev = lmax;
    lmax = nw;
    v = w / nw;
    if (std::abs(lmax - prev) <= 1e-8 * lmax) break;
  }
  return lmax;
}

RecoveryResult fista(const QuadraticModel& model, const SolveSettings& settings,
                     const CVector* warm_start) {
  if (settings.gamma < 0.0) throw ConfigError("l1_penalty: gamma must be >= 0");
  const double gamma = settings.gamma;
  double lip = settings.fista_step > 0.0
                   ? 1.0 / settings.fista_step
                   : 1.05 * power_iteration_lmax(model, settings.seed);
  if (lip <= 0.0) lip = 1.0;
  double step = 1.0 / lip;

  CVector x = warm_start ? *warm_start : CVector::Zero(model.n);
  CVector gx = model.apply_gram(x);
  auto objective = [&](const CVector& u, const CVector& gu) {
    const double misfit = std::real(u.dot(gu)) - 2.0 * std::real(model.corr.dot(u)) +
                          model.d_norm_sq;
    return 0.5 * std::max(0.0, misfit) + gamma * l1_norm(u);
  };
  double obj = objective(x, gx);

  CVector x_prev = x, gx_prev = gx;
  double t = 1.0;
  RecoveryResult res;
  int it = 0;
  for (; it < settings.max_iters; ++it) {
    const double t_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double w = (t - 1.0) / t_new;
    // y = x + w (x - x_prev); G y assembled from cached products.
    const CVector y = x + w * (x - x_prev);
    const CVector gy = gx + w * (gx - gx_prev);
    const CVector x_new = complex_soft_threshold(y - step * (gy - model.corr), step * gamma);
    const CVector gx_new = model.apply_gram(x_new);
    const double obj_new = objective(x_new, gx_new);

    if (obj_new > obj * (1.0 + 1e-12) + 1e-300) {
      if (w == 0.0) {
        // A plain proximal step increased the objective: the Lipschitz
        // estimate was too small. Backtrack and retry.
        step *= 0.5;
        t = 1.0;
        continue;
      }
      t = 1.0;  // momentum restart, retry as plain step
      continue;
    }

    const double dx = (x_new - x).norm();
    const double ref = std::max(1.0, x.norm());
    x_prev = x;
    gx_prev = gx;
    x = x_new;
    gx = gx_new;
    obj = obj_new;
    t = t_new;
    if (dx <= settings.tol_primal * ref) {
      res.converged = true;
      ++it;
      break;
    }
  }

  res.rho_star = x;
  res.iterations = it;
  const double misfit =
      std::real(x.dot(gx)) - 2.0 * std::real(model.corr.dot(x)) + model.d_norm_sq;
  res.residual_l2 = std::sqrt(std::max(0.0, misfit));
  res.objective = 0.5 * std::max(0.0, misfit) + gamma * l1_norm(x);
  finalize(res, settings.threshold_fraction);
  return res;
}

QuadraticModel matrix_model(const CMatrix& a, const CVector& d) {
  QuadraticModel model;
  model.apply_gram = [&a](const CVector& x) -> CVector {
    return a.adjoint() * (a * x);
  };
  model.corr = a.adjoint() * d;
  model.d_norm_sq = d.squaredNorm();
  model.n = static_cast<int>(a.cols());
  return model;
}

}  // namespace

SparseVector threshold(const CVector& rho, double fraction) {
  if (fraction < 0.0 || fraction >= 1.0)
    throw ConfigError("threshold: fraction must be in [0, 1)");
  double maxmod = 0.0;
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    maxmod = std::max(maxmod, std::abs(rho[i]));
  SparseVector out;
  if (maxmod == 0.0) return out;
  const double cut = fraction * maxmod;
  for (Eigen::Index i = 0; i < rho.size(); ++i)
    if (std::abs(rho[i]) >= cut) {
      out.support.push_back(static_cast<int>(i));
      out.values.push_back(rho[i]);
    }
  return out;
}

double recovery_error_inf(const CVector& rho_thresholded_dense, const CVector& truth) {
  const double denom = truth.cwiseAbs().maxCoeff();
  if (denom == 0.0)
    return rho_thresholded_dense.cwiseAbs().maxCoeff() == 0.0 ? 0.0 : HUGE_VAL;
  return (rho_thresholded_dense - truth).cwiseAbs().maxCoeff() / denom;
}

bool recovered(const CVector& rho_thresholded_dense, const CVector& truth, double tol) {
  return recovery_error_inf(rho_thresholded_dense, truth) < tol;
}

RecoveryResult basis_pursuit(const CMatrix& a, const CVector& d,
                             const SolveSettings& settings) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (d.size() != m) throw ConfigError("basis_pursuit: dimension mismatch");

  const CMatrix aah = a * a.adjoint();
  Eigen::LDLT<CMatrix> fact(aah);
  if (fact.info() != Eigen::Success)
    throw Error("basis_pursuit: factorization of A A^H failed");

  auto project = [&](const CVector& v) -> CVector {
    return v - a.adjoint() * fact.solve(a * v - d);
  };

  // Feasibility: distance from d to the range of A.
  const CVector rho_ln = a.adjoint() * fact.solve(d);
  const double dn = d.norm();
  if ((a * rho_ln - d).norm() > settings.feas_tol * std::max(dn, 1e-300))
    throw InfeasibleError("basis_pursuit: d is outside the range of the matrix");

  CVector z = CVector::Zero(n), u = CVector::Zero(n);
  RecoveryResult res;
  int it = 0;
  CVector x = CVector::Zero(n);
  for (; it < settings.max_iters; ++it) {
    x = project(z - u);
    const CVector xh = settings.admm_relax * x + (1.0 - settings.admm_relax) * z;
    const CVector z_new = complex_soft_threshold(xh + u, 1.0 / settings.admm_rho);
    u += xh - z_new;
    const double r_norm = (x - z_new).norm();
    const double s_norm = settings.admm_rho * (z_new - z).norm();
    z = z_new;
    const double pri_ref = std::max({x.norm(), z.norm(), 1e-12});
    const double dual_ref = std::max(settings.admm_rho * u.norm(), 1e-12);
    if (r_norm <= settings.tol_primal * pri_ref &&
        s_norm <= settings.tol_dual * dual_ref) {
      res.converged = true;
      ++it;
      break;
    }
  }

  res.rho_star = project(z);
  res.iterations = it;
  res.residual_l2 = (a * res.rho_star - d).norm();
  res.objective = l1_norm(res.rho_star);
  finalize(res, settings.threshold_fraction);
  return res;
}

RecoveryResult basis_pursuit(const SensingMatrix& m, const CVector& d,
                             const SolveSettings& settings) {
  return basis_pursuit(m.entries(), d, settings);
}

RecoveryResult l1_penalty(const CMatrix& a, const CVector& d,
                          const SolveSettings& settings) {
  return fista(matrix_model(a, d), settings, nullptr);
}

RecoveryResult l1_penalty(const SensingMatrix& m, const CVector& d,
                          const SolveSettings& settings) {
  return l1_penalty(m.entries(), d, settings);
}

RecoveryResult l1_penalty_normal(const CMatrix& gram, const CVector& corr,
                                 double d_norm_sq, const SolveSettings& settings) {
  QuadraticModel model;
  model.apply_gram = [&gram](const CVector& x) -> CVector { return gram * x; };
  model.corr = corr;
  model.d_norm_sq = d_norm_sq;
  model.n = static_cast<int>(gram.cols());
  return fista(model, settings, nullptr);
}

RecoveryResult constrained_denoise(const CMatrix& a, const CVector& d,
                                   double noise_level,
                                   const SolveSettings& settings) {
  if (noise_level < 0.0)
    throw ConfigError("constrained_denoise: noise_level must be >= 0");
  if (noise_level == 0.0) return basis_pursuit(a, d, settings);

  const double dn = d.norm();
  RecoveryResult res;
  if (noise_level >= dn) {
    res.rho_star = CVector::Zero(a.cols());
    res.residual_l2 = dn;
    res.objective = 0.0;
    res.converged = true;
    finalize(res, settings.threshold_fraction);
    return res;
  }

  const QuadraticModel model = matrix_model(a, d);
  const double gamma_hi_start = model.corr.cwiseAbs().maxCoeff();

  SolveSettings inner = settings;

  // Residual grows monotonically with gamma; bracket then bisect in log space.
  double lo = 1e-10 * gamma_hi_start, hi = gamma_hi_start;
  inner.gamma = lo;
  RecoveryResult at_lo = fista(model, inner, nullptr);
  if (at_lo.residual_l2 > noise_level * 1.02)
    throw InfeasibleError(
        "constrained_denoise: noise_level below best achievable residual");
  if (at_lo.residual_l2 >= noise_level * 0.98) return at_lo;

  CVector warm = at_lo.rho_star;
  for (int it = 0; it < 60; ++it) {
    const double mid = std::sqrt(lo * hi);
    inner.gamma = mid;
    res = fista(model, inner, &warm);
    warm = res.rho_star;
    if (res.residual_l2 > noise_level * 1.02) {
      hi = mid;
    } else if (res.residual_l2 < noise_level * 0.98) {
      lo = mid;
    } else {
      return res;
    }
  }
  return res;  // last iterate; caller can inspect residual_l2
}

}  // namespace sparseimg
