#pragma once

#include <memory>
#include <string>

#include "sparseimg/geometry.hpp"
#include "sparseimg/types.hpp"
#include "sparseimg/wavemodel.hpp"

namespace sparseimg {

enum class SensingMode { single_freq, multi_freq, born };

/// How the matrix entries are generated: exact Green's functions, or the
/// phase-only paraxial model (spreading factors dropped, range phase
/// linearized; always single frequency).
enum class ModelKind { exact_greens, paraxial_model };

/// Column-normalized sensing matrix with normalization and phase-strip
/// metadata.
///
/// Columns are stored phase-stripped: the raw column for grid point z_j is
/// multiplied by conj(Z_j) with Z_j = exp(i k0 z3_j), so that nearby points
/// have column inner products close to one. A vector rho solved against this
/// matrix maps back to physical amplitudes via rho_phys_j =
/// conj(Z_j) rho_j / alpha_j.
class SensingMatrix {
 public:
  SensingMatrix() = default;

  int rows() const { return static_cast<int>(entries_.rows()); }
  int cols() const { return static_cast<int>(entries_.cols()); }
  const CMatrix& entries() const { return entries_; }
  const RVector& column_norms() const { return alpha_; }
  const CVector& phase_strip() const { return phase_strip_; }
  SensingMode mode() const { return mode_; }
  ModelKind model() const { return model_; }
  const ImagingGeometry& geometry() const { return geom_; }
  const Grid& grid() const { return geom_.grid(); }

  CVector apply(const CVector& rho) const;
  CVector apply(const SparseVector& rho) const;

  /// Normalized, phase-stripped column for an arbitrary (possibly off-grid)
  /// position, built by the same recipe as the stored columns.
  CVector column_for_position(const Vec3& y) const;

  /// Maps an on-grid scene to the stripped unknown vector:
  /// rho_j = Z_j alpha_j amplitude. Throws if a source is off the grid.
  SparseVector truth_vector(const SourceScene& scene) const;

  static SensingMatrix from_parts(CMatrix entries, RVector alpha,
                                  CVector phase_strip, SensingMode mode,
                                  ModelKind model, ImagingGeometry geom);

  friend SensingMatrix assemble_exact(const ImagingGeometry&, SensingMode);
  friend SensingMatrix assemble_paraxial_model(const ImagingGeometry&);

 private:
  CMatrix entries_;
  RVector alpha_;
  CVector phase_strip_;
  SensingMode mode_ = SensingMode::single_freq;
  ModelKind model_ = ModelKind::exact_greens;
  ImagingGeometry geom_;
};

/// Exact Green's-function matrix. Rows are frequency-major (l * Mr + r).
/// born mode requires an emitter in the geometry. Throws SingularityError
/// if a grid point coincides with a sensor.
SensingMatrix assemble_exact(const ImagingGeometry& geom, SensingMode mode);

/// Paraxial phase-only matrix on the receiver lattice: entries
/// exp(-i k0 [ |x_r|^2 (z3_j - L) / (2 L^2) + x_r . z_j / L ]) / sqrt(Mr).
/// Unit columns by construction; valid for windows of any depth since no
/// Green's function is evaluated.
SensingMatrix assemble_paraxial_model(const ImagingGeometry& geom);

/// Analytic translation-invariant Gram evaluated on the offset lattice of
/// the grid. paraxial: separable Fresnel-integral product. broadband:
/// Gaussian-in-range times sinc-in-cross-range (signed real).
class GramKernel {
 public:
  enum class Kind { paraxial, broadband };

  GramKernel(const ImagingGeometry& geom, Kind kind);

  Kind kind() const { return kind_; }
  const Grid& grid() const { return geom_.grid(); }
  const ImagingGeometry& geometry() const { return geom_; }

  cdouble entry(int j, int q) const;  // <g_j, g_q> by offset lookup
  cdouble entry_offset(int d1, int d2, int d3) const;
  double modulus_offset(int d1, int d2, int d3) const {
    return std::abs(entry_offset(d1, d2, d3));
  }

  /// Continuous-offset evaluation; positions need not be on the grid.
  cdouble at_positions(const Vec3& a, const Vec3& b) const;

  /// Dense N x N Gram (Hermitian, unit diagonal).
  CMatrix dense() const;

  /// Square root factor R (q x N) with R^H R ~ dense Gram, eigenvalues below
  /// rel_tol * max clipped. Usable as a model sensing matrix for solves.
  CMatrix reduced_root(double rel_tol = 1e-12) const;

 private:
  ImagingGeometry geom_;
  Kind kind_ = Kind::paraxial;
  // Fresnel integrals per (cross-range offset, |range offset|); the
  // broadband table stores the separable 1D factors the same way.
  CMatrix factor_table_;  // (2 n1 - 1) x n3
  RVector range_gauss_;   // broadband only: Gaussian per |d3|
  double scaleH_ = 0.0, scaleH3_ = 0.0;
};

/// The spec'd paraxial Gram assembly; warns are left to callers via
/// check_paraxial_regime.
GramKernel assemble_paraxial_gram(const ImagingGeometry& geom);

/// Uniform access to normalized column inner products for coherence and
/// fine-grid analysis, implemented over either a SensingMatrix or a
/// GramKernel. Inner products follow inner(u, v) = sum u conj(v).
class ColumnOracle {
 public:
  virtual ~ColumnOracle() = default;
  virtual const Grid& grid() const = 0;
  virtual cdouble inner_grid(int j, int q) const = 0;
  /// <g_y, g_q> for every grid point q.
  virtual CVector correlate_point(const Vec3& y) const = 0;
  virtual cdouble inner_points(const Vec3& a, const Vec3& b) const = 0;
};

class MatrixColumnOracle final : public ColumnOracle {
 public:
  explicit MatrixColumnOracle(const SensingMatrix& m) : m_(m) {}
  const Grid& grid() const override { return m_.grid(); }
  cdouble inner_grid(int j, int q) const override {
    return inner(m_.entries().col(j), m_.entries().col(q));
  }
  CVector correlate_point(const Vec3& y) const override {
    return m_.entries().adjoint() * m_.column_for_position(y);
  }
  cdouble inner_points(const Vec3& a, const Vec3& b) const override {
    return inner(m_.column_for_position(a), m_.column_for_position(b));
  }

 private:
  const SensingMatrix& m_;
};

class KernelColumnOracle final : public ColumnOracle {
 public:
  explicit KernelColumnOracle(const GramKernel& k) : k_(k) {}
  const Grid& grid() const override { return k_.grid(); }
  cdouble inner_grid(int j, int q) const override { return k_.entry(j, q); }
  CVector correlate_point(const Vec3& y) const override;
  cdouble inner_points(const Vec3& a, const Vec3& b) const override {
    return k_.at_positions(a, b);
  }

 private:
  const GramKernel& k_;
};

}  // namespace sparseimg
