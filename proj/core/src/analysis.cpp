#include "sparseimg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sparseimg {

SupportDecomposition decompose_support(const SparseVector& rho,
                                       const std::vector<Vec3>& centers,
                                       double r, const ColumnOracle& oracle) {
  if (r <= 0.0 || r >= 1.0)
    throw ConfigError("decompose_support: r must be in (0,1)");
  const int m = static_cast<int>(centers.size());
  const int n = oracle.grid().size();

  // dist(i, q) = D(center_i, z_q) over the whole grid; also validates the
  // disjointness precondition.
  RMatrix dist(m, n);
  for (int i = 0; i < m; ++i)
    dist.row(i) =
        (1.0 - oracle.correlate_point(centers[i]).cwiseAbs().array()).transpose();
  for (int q = 0; q < n; ++q) {
    int first = -1;
    for (int i = 0; i < m; ++i) {
      if (dist(i, q) < r) {
        if (first >= 0) {
          std::ostringstream msg;
          msg << "decompose_support: balls " << first << " and " << i
              << " overlap at grid point " << q;
          throw HypothesisError(msg.str());
        }
        first = i;
      }
    }
  }

  SupportDecomposition out;
  out.radius = r;
  for (int e = 0; e < rho.size(); ++e) {
    const int q = rho.support[e];
    int ball = -1;
    for (int i = 0; i < m; ++i)
      if (dist(i, q) < r) {
        ball = i;
        break;
      }
    if (ball >= 0) {
      out.inner.support.push_back(q);
      out.inner.values.push_back(rho.values[e]);
      out.ball_of_inner.push_back(ball);
    } else {
      out.outer.support.push_back(q);
      out.outer.values.push_back(rho.values[e]);
    }
  }
  out.inner_l1 = out.inner.norm_l1();
  out.outer_l1 = out.outer.norm_l1();
  out.total_l1 = out.inner_l1 + out.outer_l1;
  out.outer_fraction = out.total_l1 > 0.0 ? out.outer_l1 / out.total_l1 : 0.0;
  return out;
}

SupportDecomposition decompose_support(const RecoveryResult& result,
                                       const std::vector<Vec3>& centers,
                                       double r, const ColumnOracle& oracle) {
  return decompose_support(result.rho_thresholded, centers, r, oracle);
}

EffectiveSource effective_source(const SupportDecomposition& decomp,
                                 const std::vector<Vec3>& centers,
                                 const ColumnOracle& oracle,
                                 const CVector* truth_at_centers) {
  const int m = static_cast<int>(centers.size());
  EffectiveSource out;
  out.values = CVector::Zero(m);
  for (int i = 0; i < m; ++i) {
    const CVector corr = oracle.correlate_point(centers[i]);
    for (int e = 0; e < decomp.inner.size(); ++e)
      if (decomp.ball_of_inner[e] == i)
        out.values[i] += decomp.inner.values[e] * corr[decomp.inner.support[e]];
  }
  if (truth_at_centers) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < m; ++i) {
      num += std::abs((*truth_at_centers)[i] - out.values[i]);
      den += std::abs((*truth_at_centers)[i]);
    }
    out.error_l1_rel = den > 0.0 ? num / den : 0.0;
  }
  return out;
}

BallCover cluster_cover(const std::vector<Vec3>& sources, double epsilon,
                        const ColumnOracle& oracle) {
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw ConfigError("cluster_cover: epsilon must be in (0,1)");
  const int s = static_cast<int>(sources.size());
  if (s == 0) throw ConfigError("cluster_cover: empty source set");
  const Grid& grid = oracle.grid();

  // D(nearest grid point of source i, source l)
  std::vector<int> near(s);
  RMatrix dist(s, s);
  for (int i = 0; i < s; ++i) {
    near[i] = grid.nearest_index(sources[i]);
    const Vec3 c = grid.point(near[i]);
    for (int l = 0; l < s; ++l)
      dist(i, l) = semi_metric_from_inner(oracle.inner_points(c, sources[l]));
  }

  BallCover cover;
  cover.epsilon = epsilon;
  cover.cover_of_source.assign(s, -1);
  std::vector<bool> covered(s, false);
  int remaining = s;
  while (remaining > 0) {
    int best = -1, best_count = 0;
    for (int i = 0; i < s; ++i) {
      if (covered[i]) continue;
      int count = 0;
      for (int l = 0; l < s; ++l)
        if (!covered[l] && dist(i, l) < epsilon) ++count;
      if (count > best_count) {
        best_count = count;
        best = i;
      }
    }
    if (best < 0)
      throw HypothesisError(
          "cluster_cover: a source lies farther than epsilon from its own "
          "nearest grid point; no cover at this epsilon");
    const int ball = static_cast<int>(cover.center_grid_index.size());
    cover.center_grid_index.push_back(near[best]);
    for (int l = 0; l < s; ++l)
      if (!covered[l] && dist(best, l) < epsilon) {
        covered[l] = true;
        cover.cover_of_source[l] = ball;
        --remaining;
      }
  }

  std::vector<Vec3> centers;
  centers.reserve(cover.center_grid_index.size());
  for (int c : cover.center_grid_index) centers.push_back(grid.point(c));
  if (centers.size() > 1) {
    std::pair<int, int> clash;
    if (!balls_disjoint(centers, epsilon, oracle, &clash)) {
      std::ostringstream msg;
      msg << "cluster_cover: cover balls " << clash.first << " and "
          << clash.second << " overlap; no disjoint cover at this epsilon";
      throw HypothesisError(msg.str());
    }
  }
  return cover;
}

EffectiveSource cluster_effective_source(const SparseVector& rho_true,
                                         const BallCover& cover,
                                         const ColumnOracle& oracle) {
  const int m = static_cast<int>(cover.center_grid_index.size());
  EffectiveSource out;
  out.epsilon = cover.epsilon;
  out.values = CVector::Zero(m);
  for (int j = 0; j < m; ++j) {
    const int cj = cover.center_grid_index[j];
    for (int e = 0; e < rho_true.size(); ++e) {
      const int q = rho_true.support[e];
      const cdouble w = oracle.inner_grid(q, cj);
      if (1.0 - std::abs(w) < cover.epsilon)
        out.values[j] += rho_true.values[e] * w;
    }
  }
  return out;
}

OuterMassBound separated_support_bound(const SupportDecomposition& decomp,
                                       double interaction) {
  OuterMassBound out;
  out.interaction = interaction;
  out.r = decomp.radius;
  out.lhs = decomp.outer_l1;
  out.rhs = (2.0 * interaction / decomp.radius) * decomp.total_l1;
  out.applicable = 2.0 * interaction < decomp.radius;
  out.holds = out.lhs <= out.rhs;
  return out;
}

OuterMassBound effective_error_bound(const EffectiveSource& eff,
                                     const CVector& truth_at_centers,
                                     double interaction, double r) {
  OuterMassBound out;
  out.interaction = interaction;
  out.r = r;
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < truth_at_centers.size(); ++i) {
    num += std::abs(truth_at_centers[i] - eff.values[i]);
    den += std::abs(truth_at_centers[i]);
  }
  out.lhs = num;
  out.rhs = (2.0 * interaction / r) * den;
  out.applicable = 2.0 * interaction < r;
  out.holds = out.lhs <= out.rhs;
  return out;
}

ClusterMassBound cluster_support_bound(const SupportDecomposition& decomp,
                                       const EffectiveSource& eff,
                                       const SparseVector& rho_true,
                                       double interaction_eps) {
  ClusterMassBound out;
  out.interaction_eps = interaction_eps;
  out.r = decomp.radius;
  out.epsilon = eff.epsilon;
  out.rho_l1 = rho_true.norm_l1();
  double eff_l1 = 0.0;
  for (Eigen::Index i = 0; i < eff.values.size(); ++i)
    eff_l1 += std::abs(eff.values[i]);
  out.rho_eff_l1 = eff_l1;
  out.lhs = decomp.outer_l1;
  out.rhs = (2.0 * interaction_eps / out.r) * decomp.total_l1 +
            (out.rho_l1 - out.rho_eff_l1) / out.r;
  out.applicable = eff.epsilon < out.r && out.r < 1.0 && interaction_eps < 1.0;
  out.holds = out.lhs <= out.rhs;
  return out;
}

std::vector<BallMass> ball_mass_table(const SupportDecomposition& decomp,
                                      const std::vector<Vec3>& centers) {
  std::vector<BallMass> table(centers.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    table[i].ball = static_cast<int>(i);
    table[i].center = centers[i];
    table[i].radius = decomp.radius;
  }
  for (int e = 0; e < decomp.inner.size(); ++e) {
    BallMass& row = table[decomp.ball_of_inner[e]];
    row.l1_mass += std::abs(decomp.inner.values[e]);
    row.entry_count += 1;
  }
  return table;
}

}  // namespace sparseimg
