#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparseimg {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

// Inner product convention used throughout: inner(u, v) = sum_m u_m * conj(v_m),
// linear in the first argument. In Eigen terms this is v.dot(u).
inline cdouble inner(const CVector& u, const CVector& v) { return v.dot(u); }

/// Sparse complex vector: distinct in-range indices with their amplitudes.
struct SparseVector {
  std::vector<int> support;
  std::vector<cdouble> values;

  int size() const { return static_cast<int>(support.size()); }

  CVector to_dense(int n) const {
    CVector out = CVector::Zero(n);
    for (int i = 0; i < size(); ++i) out[support[i]] = values[i];
    return out;
  }

  double norm_l1() const {
    double s = 0.0;
    for (const auto& v : values) s += std::abs(v);
    return s;
  }
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration input.
struct ConfigError : Error {
  using Error::Error;
};

/// Evaluation at (or too close to) a Green's function singularity.
struct SingularityError : Error {
  using Error::Error;
};

/// Requested problem is infeasible (constraint set empty at tolerance).
struct InfeasibleError : Error {
  using Error::Error;
};

/// A stated hypothesis (disjoint balls, cover existence, ...) does not hold.
struct HypothesisError : Error {
  using Error::Error;
};

}  // namespace sparseimg
