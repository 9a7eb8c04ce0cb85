#include "sparseimg/sensing.hpp"

#include <algorithm>
#include <cmath>

#include "sparseimg/fresnel.hpp"

namespace sparseimg {

CVector SensingMatrix::apply(const CVector& rho) const {
  if (rho.size() != entries_.cols())
    throw ConfigError("apply: dimension mismatch");
  return entries_ * rho;
}

CVector SensingMatrix::apply(const SparseVector& rho) const {
  CVector d = CVector::Zero(entries_.rows());
  for (int i = 0; i < rho.size(); ++i) {
    const int j = rho.support[i];
    if (j < 0 || j >= entries_.cols())
      throw ConfigError("apply: support index out of range");
    d += rho.values[i] * entries_.col(j);
  }
  return d;
}

CVector SensingMatrix::column_for_position(const Vec3& y) const {
  const ImagingGeometry& g = geom_;
  const int mr = g.receiver_count();
  const double k0 = g.center_wavenumber();
  CVector col;
  if (model_ == ModelKind::paraxial_model) {
    col.resize(mr);
    const double L = g.range();
    const double z3 = y[2] - L;
    for (int r = 0; r < mr; ++r) {
      const Vec2& x = g.array().receivers[r];
      const double phase =
          -k0 * ((x.squaredNorm() * z3) / (2.0 * L * L) +
                 (x[0] * y[0] + x[1] * y[1]) / L);
      col[r] = std::polar(1.0 / std::sqrt(double(mr)), phase);
    }
    return col;
  }

  col.resize(g.measurement_count());
  const bool born = mode_ == SensingMode::born;
  const Vec3 xe = born ? *g.array().emitter : Vec3::Zero();
  for (int l = 0; l < g.omega_count(); ++l) {
    const double omega = g.frequencies()[l];
    const double f = g.pulse(omega);
    const cdouble emit =
        born ? greens(omega, xe, y, g.sound_speed()) : cdouble(1.0, 0.0);
    for (int r = 0; r < mr; ++r)
      col[l * mr + r] =
          f * emit * greens(omega, g.receiver3(r), y, g.sound_speed());
  }
  col /= col.norm();
  return col * std::polar(1.0, -k0 * y[2]);
}

SparseVector SensingMatrix::truth_vector(const SourceScene& scene) const {
  const Grid& grid = geom_.grid();
  const double tol = 1e-9 * (1.0 + geom_.range());
  SparseVector rho;
  for (int i = 0; i < scene.size(); ++i) {
    const int j = grid.nearest_index(scene.positions[i]);
    if ((grid.point(j) - scene.positions[i]).norm() > tol)
      throw ConfigError("truth_vector: source is not on the grid");
    rho.support.push_back(j);
    rho.values.push_back(phase_strip_[j] * alpha_[j] * scene.amplitudes[i]);
  }
  return rho;
}

SensingMatrix SensingMatrix::from_parts(CMatrix entries, RVector alpha,
                                        CVector phase_strip, SensingMode mode,
                                        ModelKind model, ImagingGeometry geom) {
  SensingMatrix m;
  m.entries_ = std::move(entries);
  m.alpha_ = std::move(alpha);
  m.phase_strip_ = std::move(phase_strip);
  m.mode_ = mode;
  m.model_ = model;
  m.geom_ = std::move(geom);
  return m;
}

SensingMatrix assemble_exact(const ImagingGeometry& geom, SensingMode mode) {
  if (mode == SensingMode::born && !geom.array().emitter)
    throw ConfigError("assemble_exact: born mode requires an emitter");
  if (mode == SensingMode::single_freq && geom.omega_count() != 1)
    throw ConfigError("assemble_exact: single_freq mode on multi-frequency geometry");

  SensingMatrix m;
  m.geom_ = geom;
  m.mode_ = mode;
  m.model_ = ModelKind::exact_greens;

  const int n = geom.grid().size();
  const int rows = geom.measurement_count();
  const int mr = geom.receiver_count();
  const double k0 = geom.center_wavenumber();
  const bool born = mode == SensingMode::born;
  const Vec3 xe = born ? *geom.array().emitter : Vec3::Zero();

  m.entries_.resize(rows, n);
  m.alpha_.resize(n);
  m.phase_strip_.resize(n);
  for (int j = 0; j < n; ++j) {
    const Vec3 zj = geom.grid().point(j);
    for (int l = 0; l < geom.omega_count(); ++l) {
      const double omega = geom.frequencies()[l];
      const double f = geom.pulse(omega);
      const cdouble emit =
          born ? greens(omega, xe, zj, geom.sound_speed()) : cdouble(1.0, 0.0);
      for (int r = 0; r < mr; ++r)
        m.entries_(l * mr + r, j) =
            f * emit * greens(omega, geom.receiver3(r), zj, geom.sound_speed());
    }
    const double alpha = m.entries_.col(j).norm();
    m.alpha_[j] = alpha;
    m.phase_strip_[j] = std::polar(1.0, k0 * zj[2]);
    m.entries_.col(j) *= std::conj(m.phase_strip_[j]) / alpha;
  }
  return m;
}

SensingMatrix assemble_paraxial_model(const ImagingGeometry& geom) {
  if (geom.omega_count() != 1)
    throw ConfigError("assemble_paraxial_model: single frequency only");

  SensingMatrix m;
  m.geom_ = geom;
  m.mode_ = SensingMode::single_freq;
  m.model_ = ModelKind::paraxial_model;

  const int n = geom.grid().size();
  const int mr = geom.receiver_count();
  const double k0 = geom.center_wavenumber();
  const double L = geom.range();
  const double scale = 1.0 / std::sqrt(double(mr));

  m.entries_.resize(mr, n);
  m.alpha_.resize(n);
  m.phase_strip_.resize(n);
  for (int j = 0; j < n; ++j) {
    const Vec3 zj = geom.grid().point(j);
    const double z3 = zj[2] - L;
    for (int r = 0; r < mr; ++r) {
      const Vec2& x = geom.array().receivers[r];
      const double phase =
          -k0 * ((x.squaredNorm() * z3) / (2.0 * L * L) +
                 (x[0] * zj[0] + x[1] * zj[1]) / L);
      m.entries_(r, j) = std::polar(scale, phase);
    }
    // Physical normalization of the dropped spreading factor 1/(4 pi L).
    m.alpha_[j] = std::sqrt(double(mr)) / (4.0 * M_PI * L);
    m.phase_strip_[j] = std::polar(1.0, k0 * zj[2]);
  }
  return m;
}

GramKernel::GramKernel(const ImagingGeometry& geom, Kind kind)
    : geom_(geom), kind_(kind) {
  const auto& counts = geom.grid().counts();
  const ParaxialScales s = paraxial_scales(geom);
  const int n = std::max(counts[0], counts[1]);
  const int n3 = counts[2];
  if (kind_ == Kind::paraxial) {
    scaleH_ = geom.mesh_h() / s.H;
    scaleH3_ = geom.mesh_h3() / s.H3;
    factor_table_.resize(n, n3);
    for (int d = 0; d < n; ++d)
      for (int e = 0; e < n3; ++e)
        factor_table_(d, e) = fresnel_integral(d * scaleH_, e * scaleH3_);
  } else {
    if (geom.bandwidth() <= 0.0)
      throw ConfigError("GramKernel: broadband kernel requires bandwidth > 0");
    scaleH_ = geom.mesh_h() / s.calH;
    scaleH3_ = geom.mesh_h3() / s.calH3;
    factor_table_.resize(n, 1);
    for (int d = 0; d < n; ++d)
      factor_table_(d, 0) = sinc(d * scaleH_);
    range_gauss_.resize(n3);
    for (int e = 0; e < n3; ++e)
      range_gauss_[e] = std::exp(-(e * scaleH3_) * (e * scaleH3_));
  }
}

cdouble GramKernel::entry_offset(int d1, int d2, int d3) const {
  const int a1 = std::abs(d1), a2 = std::abs(d2), a3 = std::abs(d3);
  if (kind_ == Kind::paraxial) {
    cdouble v = factor_table_(a1, a3) * factor_table_(a2, a3);
    return d3 < 0 ? std::conj(v) : v;
  }
  return range_gauss_[a3] * factor_table_(a1, 0) * factor_table_(a2, 0);
}

cdouble GramKernel::entry(int j, int q) const {
  const auto cj = geom_.grid().coords(j);
  const auto cq = geom_.grid().coords(q);
  return entry_offset(cj[0] - cq[0], cj[1] - cq[1], cj[2] - cq[2]);
}

cdouble GramKernel::at_positions(const Vec3& a, const Vec3& b) const {
  const ParaxialScales s = paraxial_scales(geom_);
  const Vec3 d = a - b;
  if (kind_ == Kind::paraxial) {
    const double eta = d[2] / s.H3;
    return fresnel_integral(d[0] / s.H, eta) * fresnel_integral(d[1] / s.H, eta);
  }
  const double cb = geom_.sound_speed() / geom_.bandwidth();
  return std::exp(-d[2] * d[2] / (2.0 * cb * cb)) * sinc(d[0] / s.calH) *
         sinc(d[1] / s.calH);
}

CMatrix GramKernel::dense() const {
  const int n = geom_.grid().size();
  CMatrix g(n, n);
  for (int q = 0; q < n; ++q) {
    g(q, q) = 1.0;
    for (int j = q + 1; j < n; ++j) {
      g(j, q) = entry(j, q);
      g(q, j) = std::conj(g(j, q));
    }
  }
  return g;
}

CMatrix GramKernel::reduced_root(double rel_tol) const {
  const CMatrix g = dense();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(g);
  const RVector& vals = eig.eigenvalues();
  const double cutoff = rel_tol * std::max(vals.maxCoeff(), 0.0);
  int kept = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals[i] > cutoff) ++kept;
  CMatrix root(kept, g.cols());
  int row = 0;
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] <= cutoff) continue;
    root.row(row++) = std::sqrt(vals[i]) * eig.eigenvectors().col(i).adjoint();
  }
  return root;
}

GramKernel assemble_paraxial_gram(const ImagingGeometry& geom) {
  return GramKernel(geom, GramKernel::Kind::paraxial);
}

CVector KernelColumnOracle::correlate_point(const Vec3& y) const {
  const Grid& grid = k_.grid();
  CVector out(grid.size());
  for (int q = 0; q < grid.size(); ++q)
    out[q] = k_.at_positions(y, grid.point(q));
  return out;
}

}  // namespace sparseimg
