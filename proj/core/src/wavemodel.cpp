#include "sparseimg/wavemodel.hpp"

#include <cmath>
#include <random>

#include "sparseimg/fresnel.hpp"

namespace sparseimg {

cdouble greens(double omega, const Vec3& x, const Vec3& y, double c) {
  const double dist = (x - y).norm();
  if (dist < 1e-12)
    throw SingularityError("greens: evaluation at coincident points");
  const double k = omega / c;
  return std::polar(1.0 / (4.0 * M_PI * dist), k * dist);
}

ParaxialScales paraxial_scales(const ImagingGeometry& geom) {
  const double k0 = geom.center_wavenumber();
  const double a = geom.aperture(), L = geom.range();
  ParaxialScales s;
  s.H = L / (k0 * a);
  s.H3 = 2.0 * L * L / (k0 * a * a);
  s.calH = 2.0 * L / (k0 * a);
  s.calH3 = geom.bandwidth() > 0.0
                ? std::sqrt(2.0) * geom.sound_speed() / geom.bandwidth()
                : 0.0;
  return s;
}

cdouble paraxial_gram(const ImagingGeometry& geom, const Vec3& zj, const Vec3& zq) {
  const ParaxialScales s = paraxial_scales(geom);
  const Vec3 d = zj - zq;
  const double eta = d[2] / s.H3;
  return fresnel_integral(d[0] / s.H, eta) * fresnel_integral(d[1] / s.H, eta);
}

double broadband_gram_signed(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl) {
  if (geom.bandwidth() <= 0.0)
    throw ConfigError("broadband_gram requires a positive bandwidth");
  const ParaxialScales s = paraxial_scales(geom);
  const Vec3 d = zq - zl;
  const double cb = geom.sound_speed() / geom.bandwidth();
  return std::exp(-d[2] * d[2] / (2.0 * cb * cb)) * sinc(d[0] / s.calH) *
         sinc(d[1] / s.calH);
}

double broadband_gram(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl) {
  return std::abs(broadband_gram_signed(geom, zq, zl));
}

namespace {

cdouble raw_broadband_sum(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl) {
  cdouble acc(0.0, 0.0);
  for (double omega : geom.frequencies()) {
    const double f = geom.pulse(omega);
    cdouble freq_acc(0.0, 0.0);
    for (int r = 0; r < geom.receiver_count(); ++r) {
      const Vec3 xr = geom.receiver3(r);
      freq_acc += greens(omega, xr, zq, geom.sound_speed()) *
                  std::conj(greens(omega, xr, zl, geom.sound_speed()));
    }
    acc += f * f * freq_acc;
  }
  return acc;
}

}  // namespace

cdouble broadband_gram_discrete(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl) {
  if (geom.frequencies().empty())
    throw ConfigError("broadband_gram_discrete: empty frequency list");
  const double k0 = geom.center_wavenumber();
  const cdouble strip = std::polar(1.0, -k0 * (zq[2] - zl[2]));
  const cdouble raw = raw_broadband_sum(geom, zq, zl) * strip;
  const double nq = std::sqrt(std::abs(raw_broadband_sum(geom, zq, zq)));
  const double nl = std::sqrt(std::abs(raw_broadband_sum(geom, zl, zl)));
  return raw / (nq * nl);
}

CVector foldy_lax_solve(const ScattererScene& scene, double omega,
                        const Vec3& emitter, double c, double cond_threshold) {
  const int s = scene.size();
  if (s < 1) throw ConfigError("foldy_lax_solve: empty scene");
  CMatrix Q = CMatrix::Identity(s, s);
  for (int j = 0; j < s; ++j)
    for (int l = 0; l < s; ++l) {
      if (l == j) continue;
      Q(j, l) = -greens(omega, scene.positions[l], scene.positions[j], c) *
                scene.reflectivities[l];
    }
  CVector rhs(s);
  for (int j = 0; j < s; ++j)
    rhs[j] = greens(omega, emitter, scene.positions[j], c);

  Eigen::JacobiSVD<CMatrix> svd(Q, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues()(s - 1);
  const double smax = svd.singularValues()(0);
  if (smin <= 0.0 || smax / smin > cond_threshold)
    throw Error("foldy_lax_solve: scattering system is near-singular");
  return svd.solve(rhs);
}

CVector add_relative_noise(const CVector& d, double level, std::uint64_t seed) {
  if (level <= 0.0) return d;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector noise(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i)
    noise[i] = cdouble(gauss(rng), gauss(rng));
  const double target = level * d.norm();
  if (noise.norm() > 0.0) noise *= target / noise.norm();
  return d + noise;
}

CVector synthesize_data(const SourceScene& scene, const ImagingGeometry& geom,
                        double noise_level, std::uint64_t seed) {
  if (scene.size() == 0) throw ConfigError("synthesize_data: empty scene");
  const int mr = geom.receiver_count();
  CVector d = CVector::Zero(geom.measurement_count());
  for (int l = 0; l < geom.omega_count(); ++l) {
    const double omega = geom.frequencies()[l];
    const double f = geom.pulse(omega);
    for (int r = 0; r < mr; ++r) {
      const Vec3 xr = geom.receiver3(r);
      cdouble acc(0.0, 0.0);
      for (int j = 0; j < scene.size(); ++j)
        acc += scene.amplitudes[j] *
               greens(omega, xr, scene.positions[j], geom.sound_speed());
      d[l * mr + r] = f * acc;
    }
  }
  return add_relative_noise(d, noise_level, seed);
}

CVector synthesize_data(const ScattererScene& scene, const ImagingGeometry& geom,
                        ForwardModel model, double noise_level,
                        std::uint64_t seed) {
  if (scene.size() == 0) throw ConfigError("synthesize_data: empty scene");
  if (model == ForwardModel::sources)
    throw ConfigError("synthesize_data: scatterer scene requires born or foldy_lax");
  if (!geom.array().emitter)
    throw ConfigError("synthesize_data: scattering data requires an emitter");
  const Vec3 xe = *geom.array().emitter;
  const int mr = geom.receiver_count();

  CVector d = CVector::Zero(geom.measurement_count());
  for (int l = 0; l < geom.omega_count(); ++l) {
    const double omega = geom.frequencies()[l];
    const double f = geom.pulse(omega);
    CVector illum(scene.size());
    if (model == ForwardModel::born) {
      for (int j = 0; j < scene.size(); ++j)
        illum[j] = greens(omega, xe, scene.positions[j], geom.sound_speed());
    } else {
      illum = foldy_lax_solve(scene, omega, xe, geom.sound_speed());
    }
    for (int r = 0; r < mr; ++r) {
      const Vec3 xr = geom.receiver3(r);
      cdouble acc(0.0, 0.0);
      for (int j = 0; j < scene.size(); ++j)
        acc += scene.reflectivities[j] * illum[j] *
               greens(omega, xr, scene.positions[j], geom.sound_speed());
      d[l * mr + r] = f * acc;
    }
  }
  return add_relative_noise(d, noise_level, seed);
}

}  // namespace sparseimg
