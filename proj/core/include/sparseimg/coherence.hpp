#pragma once

#include "sparseimg/sensing.hpp"
#include "sparseimg/types.hpp"

namespace sparseimg {

/// The two set-size readings of the cumulative coherence: sum over the s
/// largest off-diagonal Gram moduli of a row, or over the s-1 largest.
enum class CoherenceVariant { sum_s_terms, sum_s_minus_1_terms };

struct CoherenceReport {
  int s = 0;
  CoherenceVariant variant = CoherenceVariant::sum_s_terms;
  double mu = 0.0;
  int argmax_column = -1;          // -1 for translation-invariant kernels
  std::vector<int> argmax_set;     // columns (or packed offsets) summed
};

/// Exact maximization of the cumulative mutual coherence over the matrix
/// columns: per row, sort the off-diagonal Gram moduli and sum the k
/// largest (k = s or s-1 per variant); return the maximum over rows.
/// Columns are expected to be normalized.
CoherenceReport cumulative_coherence(const CMatrix& columns, int s,
                                     CoherenceVariant variant = CoherenceVariant::sum_s_terms);
CoherenceReport cumulative_coherence(const SensingMatrix& matrix, int s,
                                     CoherenceVariant variant = CoherenceVariant::sum_s_terms);

/// Kernel version. Uses translation invariance: scans the two-sided offset
/// lattice of the window once, which is the worst case over all placements
/// of the reference column (a deep-interior point sees every offset).
CoherenceReport cumulative_coherence(const GramKernel& kernel, int s,
                                     CoherenceVariant variant = CoherenceVariant::sum_s_terms);

/// D(a, b) = 1 - |<g_a, g_b>|, in [0, 1]; zero iff moduli-aligned columns.
double semi_metric(const CVector& ga, const CVector& gb);
inline double semi_metric_from_inner(cdouble gram_entry) {
  return 1.0 - std::abs(gram_entry);
}

struct InteractionReport {
  double value = 0.0;
  std::vector<int> nearest_source;  // per grid point, index into sources
  RVector per_point_sums;
};

/// Interaction coefficient of a source set: for each grid point, sum the
/// column-correlation moduli over all sources except the nearest (under the
/// semi-metric; ties broken by lowest source index, which cannot change the
/// value), and take the maximum over grid points.
InteractionReport interaction_coefficient(const std::vector<Vec3>& sources,
                                          const ColumnOracle& oracle);

/// Membership in the open ball B_r(center) = { y : D(center, y) < r }.
bool ball_member(const Vec3& center, double r, const Vec3& query,
                 const ColumnOracle& oracle);

/// Checks that no grid point lies inside two of the balls B_r(centers).
/// Returns the offending pair through `clash` when not disjoint.
bool balls_disjoint(const std::vector<Vec3>& centers, double r,
                    const ColumnOracle& oracle,
                    std::pair<int, int>* clash = nullptr);

}  // namespace sparseimg
