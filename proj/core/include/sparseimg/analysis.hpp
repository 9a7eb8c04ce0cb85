#pragma once

#include "sparseimg/coherence.hpp"
#include "sparseimg/sensing.hpp"
#include "sparseimg/solver.hpp"
#include "sparseimg/types.hpp"

namespace sparseimg {

/// Split of a minimizer into the part supported inside the disjoint balls
/// B_r(center_i) and the remainder.
struct SupportDecomposition {
  SparseVector inner;
  SparseVector outer;
  std::vector<int> ball_of_inner;  // per inner entry, index into centers
  double radius = 0.0;
  double inner_l1 = 0.0;
  double outer_l1 = 0.0;
  double total_l1 = 0.0;
  double outer_fraction = 0.0;
};

/// Partitions the thresholded support by open-ball membership under the
/// semi-metric. Requires the balls around the centers to be disjoint over
/// the grid; throws HypothesisError naming the offending pair otherwise.
SupportDecomposition decompose_support(const SparseVector& rho,
                                       const std::vector<Vec3>& centers,
                                       double r, const ColumnOracle& oracle);
SupportDecomposition decompose_support(const RecoveryResult& result,
                                       const std::vector<Vec3>& centers,
                                       double r, const ColumnOracle& oracle);

/// Gram-weighted aggregation of the inner entries per ball:
/// value_i = sum_{q in ball i} rho_q <g_center_i, g_q>.
struct EffectiveSource {
  CVector values;       // one per center
  double epsilon = 0.0; // cover radius when built from a cluster cover
  // ||truth - values||_1 / ||truth||_1 when a truth vector was supplied.
  double error_l1_rel = -1.0;
};

EffectiveSource effective_source(const SupportDecomposition& decomp,
                                 const std::vector<Vec3>& centers,
                                 const ColumnOracle& oracle,
                                 const CVector* truth_at_centers = nullptr);

/// Disjoint-ball cover of a source set by balls of radius epsilon centered
/// at grid points (the nearest grid point of a source). Greedy: repeatedly
/// center on the uncovered source whose ball covers the most uncovered
/// sources. Throws HypothesisError when no disjoint cover exists at this
/// epsilon.
struct BallCover {
  std::vector<int> center_grid_index;
  std::vector<int> cover_of_source;  // per source, index into centers
  double epsilon = 0.0;
};

BallCover cluster_cover(const std::vector<Vec3>& sources, double epsilon,
                        const ColumnOracle& oracle);

/// Effective source vector of a cover: value_j = sum over true entries in
/// B_eps(center_j) of rho_q <g_q, g_center_j>.
EffectiveSource cluster_effective_source(const SparseVector& rho_true,
                                         const BallCover& cover,
                                         const ColumnOracle& oracle);

/// Outer-mass bound for well separated sources:
/// ||rho_out||_1 <= (2 I(Y) / r) ||rho_star||_1. Applicable when 2 I(Y) < r.
struct OuterMassBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double interaction = 0.0;
  double r = 0.0;
  bool applicable = false;
  bool holds = false;
};

OuterMassBound separated_support_bound(const SupportDecomposition& decomp,
                                       double interaction);

/// Effective-source error bound: ||rho - rho_eff||_1 <= (2 I(Y)/r) ||rho||_1.
OuterMassBound effective_error_bound(const EffectiveSource& eff,
                                     const CVector& truth_at_centers,
                                     double interaction, double r);

/// Cluster outer-mass bound:
/// ||rho_out||_1 <= (2 I(Y_eps)/r) ||rho_star||_1 + (||rho||_1 - ||rho_eff||_1)/r.
/// Applicable when eps < r < 1 and I(Y_eps) < 1.
struct ClusterMassBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double interaction_eps = 0.0;
  double r = 0.0;
  double epsilon = 0.0;
  double rho_l1 = 0.0;
  double rho_eff_l1 = 0.0;
  bool applicable = false;
  bool holds = false;
};

ClusterMassBound cluster_support_bound(const SupportDecomposition& decomp,
                                       const EffectiveSource& eff,
                                       const SparseVector& rho_true,
                                       double interaction_eps);

/// Per-ball l1 mass and entry count, for report tables.
struct BallMass {
  int ball = 0;
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double l1_mass = 0.0;
  int entry_count = 0;
};

std::vector<BallMass> ball_mass_table(const SupportDecomposition& decomp,
                                      const std::vector<Vec3>& centers);

}  // namespace sparseimg
