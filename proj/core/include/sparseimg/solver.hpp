#pragma once

#include <cstdint>

#include "sparseimg/sensing.hpp"
#include "sparseimg/types.hpp"

namespace sparseimg {

struct SolveSettings {
  int max_iters = 50000;
  double tol_primal = 1e-8;
  double tol_dual = 1e-8;
  double admm_rho = 1.0;
  double admm_relax = 1.6;
  double fista_step = 0.0;  // 0 selects 1/L with L from power iteration
  double gamma = 0.0;
  double threshold_fraction = 0.01;
  double feas_tol = 1e-6;
  std::uint64_t seed = 0;
};

struct RecoveryResult {
  CVector rho_star;
  SparseVector rho_thresholded;
  double residual_l2 = 0.0;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Modulus shrinkage prox of t * ||.||_1: shrinks each modulus by t and
/// keeps the phase, so every output entry is a nonnegative real multiple of
/// its input entry.
CVector complex_soft_threshold(const CVector& x, double t);

/// Zeroes entries with modulus below fraction * max modulus; entries exactly
/// at the threshold are kept.
SparseVector threshold(const CVector& rho, double fraction);

/// Appendix-style recovery verdict: || thresholded - truth ||_inf /
/// || truth ||_inf < tol.
bool recovered(const CVector& rho_thresholded_dense, const CVector& truth,
               double tol = 0.01);
double recovery_error_inf(const CVector& rho_thresholded_dense, const CVector& truth);

/// min ||rho||_1 subject to A rho = d, by operator splitting: alternate
/// projection onto the affine constraint (cached factorization of A A^H)
/// with complex soft-thresholding. Throws InfeasibleError when d is outside
/// the numerical range of A.
RecoveryResult basis_pursuit(const CMatrix& a, const CVector& d,
                             const SolveSettings& settings = {});
RecoveryResult basis_pursuit(const SensingMatrix& m, const CVector& d,
                             const SolveSettings& settings = {});

/// min 1/2 ||A rho - d||_2^2 + gamma ||rho||_1 by accelerated proximal
/// gradient with adaptive restart (monotone objective).
RecoveryResult l1_penalty(const CMatrix& a, const CVector& d,
                          const SolveSettings& settings);
RecoveryResult l1_penalty(const SensingMatrix& m, const CVector& d,
                          const SolveSettings& settings);

/// Same problem expressed through normal-equation data: gram = A^H A,
/// corr = A^H d and ||d||^2. Lets callers drive the solver from an analytic
/// kernel without materializing a measurement matrix.
RecoveryResult l1_penalty_normal(const CMatrix& gram, const CVector& corr,
                                 double d_norm_sq, const SolveSettings& settings);

/// min ||rho||_1 subject to ||A rho - d||_2 <= noise_level (absolute), by
/// outer bisection on gamma of the penalty problem until the residual is
/// within 2% of the target. noise_level = 0 falls back to basis pursuit;
/// noise_level >= ||d|| returns the zero solution.
RecoveryResult constrained_denoise(const CMatrix& a, const CVector& d,
                                   double noise_level,
                                   const SolveSettings& settings = {});

}  // namespace sparseimg
