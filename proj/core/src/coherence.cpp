#include "sparseimg/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparseimg {

namespace {

int term_count(int s, CoherenceVariant variant) {
  return variant == CoherenceVariant::sum_s_terms ? s : s - 1;
}

// Sum of the k largest values; indices of the summands returned via `top`.
double top_k_sum(const std::vector<double>& vals, int k, std::vector<int>* top) {
  std::vector<int> order(vals.size());
  std::iota(order.begin(), order.end(), 0);
  const int kk = std::min<int>(k, static_cast<int>(vals.size()));
  std::partial_sort(order.begin(), order.begin() + kk, order.end(),
                    [&vals](int a, int b) { return vals[a] > vals[b]; });
  double s = 0.0;
  for (int i = 0; i < kk; ++i) s += vals[order[i]];
  if (top) top->assign(order.begin(), order.begin() + kk);
  return s;
}

}  // namespace

CoherenceReport cumulative_coherence(const CMatrix& a, int s,
                                     CoherenceVariant variant) {
  const int n = static_cast<int>(a.cols());
  if (s < 2) throw ConfigError("cumulative_coherence: s must be >= 2");
  if (s > n) throw ConfigError("cumulative_coherence: s exceeds column count");
  const int k = term_count(s, variant);

  CoherenceReport rep;
  rep.s = s;
  rep.variant = variant;
  std::vector<double> row(n - 1);
  std::vector<int> others(n - 1), top;
  for (int j = 0; j < n; ++j) {
    const CVector corr = a.adjoint() * a.col(j);
    int w = 0;
    for (int q = 0; q < n; ++q) {
      if (q == j) continue;
      row[w] = std::abs(corr[q]);
      others[w] = q;
      ++w;
    }
    const double mu_j = top_k_sum(row, k, &top);
    if (mu_j > rep.mu) {
      rep.mu = mu_j;
      rep.argmax_column = j;
      rep.argmax_set.clear();
      for (int t : top) rep.argmax_set.push_back(others[t]);
    }
  }
  return rep;
}

CoherenceReport cumulative_coherence(const SensingMatrix& matrix, int s,
                                     CoherenceVariant variant) {
  return cumulative_coherence(matrix.entries(), s, variant);
}

CoherenceReport cumulative_coherence(const GramKernel& kernel, int s,
                                     CoherenceVariant variant) {
  const auto& counts = kernel.grid().counts();
  if (s < 2) throw ConfigError("cumulative_coherence: s must be >= 2");
  const int k = term_count(s, variant);

  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(2 * counts[0] - 1) *
               (2 * counts[1] - 1) * (2 * counts[2] - 1));
  for (int d3 = -(counts[2] - 1); d3 <= counts[2] - 1; ++d3)
    for (int d2 = -(counts[1] - 1); d2 <= counts[1] - 1; ++d2)
      for (int d1 = -(counts[0] - 1); d1 <= counts[0] - 1; ++d1) {
        if (d1 == 0 && d2 == 0 && d3 == 0) continue;
        vals.push_back(kernel.modulus_offset(d1, d2, d3));
      }
  if (k > static_cast<int>(vals.size()))
    throw ConfigError("cumulative_coherence: s exceeds offset lattice size");

  CoherenceReport rep;
  rep.s = s;
  rep.variant = variant;
  rep.mu = top_k_sum(vals, k, &rep.argmax_set);
  return rep;
}

double semi_metric(const CVector& ga, const CVector& gb) {
  return 1.0 - std::abs(inner(ga, gb));
}

InteractionReport interaction_coefficient(const std::vector<Vec3>& sources,
                                          const ColumnOracle& oracle) {
  const int s = static_cast<int>(sources.size());
  if (s < 1) throw ConfigError("interaction_coefficient: empty source set");
  const int n = oracle.grid().size();

  // rows(i, q) = |<g_{y_i}, g_q>|
  RMatrix rows(s, n);
  for (int i = 0; i < s; ++i)
    rows.row(i) = oracle.correlate_point(sources[i]).cwiseAbs().transpose();

  InteractionReport rep;
  rep.per_point_sums.resize(n);
  rep.nearest_source.resize(n);
  for (int q = 0; q < n; ++q) {
    int nearest = 0;
    double best = rows(0, q);
    double sum = rows(0, q);
    for (int i = 1; i < s; ++i) {
      sum += rows(i, q);
      if (rows(i, q) > best) {
        best = rows(i, q);
        nearest = i;
      }
    }
    rep.nearest_source[q] = nearest;
    rep.per_point_sums[q] = sum - best;
  }
  rep.value = rep.per_point_sums.maxCoeff();
  return rep;
}

bool ball_member(const Vec3& center, double r, const Vec3& query,
                 const ColumnOracle& oracle) {
  if (r <= 0.0 || r >= 1.0) throw ConfigError("ball_member: r must be in (0,1)");
  return semi_metric_from_inner(oracle.inner_points(center, query)) < r;
}

bool balls_disjoint(const std::vector<Vec3>& centers, double r,
                    const ColumnOracle& oracle, std::pair<int, int>* clash) {
  if (r <= 0.0 || r >= 1.0) throw ConfigError("balls_disjoint: r must be in (0,1)");
  const int m = static_cast<int>(centers.size());
  const int n = oracle.grid().size();
  RMatrix dist(m, n);
  for (int i = 0; i < m; ++i)
    dist.row(i) =
        (1.0 - oracle.correlate_point(centers[i]).cwiseAbs().array()).transpose();
  for (int q = 0; q < n; ++q) {
    int hits = 0, first = -1;
    for (int i = 0; i < m; ++i) {
      if (dist(i, q) < r) {
        if (++hits == 2) {
          if (clash) *clash = {first, i};
          return false;
        }
        first = i;
      }
    }
  }
  return true;
}

}  // namespace sparseimg
