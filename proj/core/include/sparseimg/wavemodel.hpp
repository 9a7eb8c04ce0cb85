#pragma once

#include <cstdint>

#include "sparseimg/geometry.hpp"
#include "sparseimg/types.hpp"

namespace sparseimg {

/// Outgoing Helmholtz Green's function exp(ik|x-y|)/(4 pi |x-y|), k = omega/c.
/// Throws SingularityError when x and y coincide.
cdouble greens(double omega, const Vec3& x, const Vec3& y, double c = 1.0);

/// Length scales of the paraxial and broadband kernels.
///   H  = lambda L / (2 pi a)      cross-range scale of the Fresnel kernel
///   H3 = lambda L^2 / (pi a^2)    range scale of the Fresnel kernel
///   calH  = 2 L / (k0 a)          broadband cross-range (sinc) scale
///   calH3 = sqrt(2) c / B         broadband range (Gaussian) scale
struct ParaxialScales {
  double H = 0.0;
  double H3 = 0.0;
  double calH = 0.0;
  double calH3 = 0.0;  // 0 when B == 0
};

ParaxialScales paraxial_scales(const ImagingGeometry& geom);

/// Normalized continuous-aperture inner product of the columns at zj and zq,
/// the separable product F(dz1/H, dz3/H3) * F(dz2/H, dz3/H3) of 1D Fresnel
/// integrals with dz = zj - zq. Equals 1 at zero offset; its modulus
/// factorizes as U * U.
cdouble paraxial_gram(const ImagingGeometry& geom, const Vec3& zj, const Vec3& zq);

/// Broadband column inner product with the quadratic aperture phase dropped:
/// a signed real value exp(-dz3^2/(2(c/B)^2)) sinc(dz1/calH) sinc(dz2/calH).
double broadband_gram_signed(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl);

/// Modulus of broadband_gram_signed, in [0, 1]. Requires bandwidth B > 0.
double broadband_gram(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl);

/// Discrete double sum over stored frequencies and receivers of
/// |pulse|^2 G Gbar with the center-frequency range phase stripped and
/// normalized so the zero-offset value is 1. Converges to broadband_gram
/// as the frequency and receiver sampling refine.
cdouble broadband_gram_discrete(const ImagingGeometry& geom, const Vec3& zq, const Vec3& zl);

struct SourceScene {
  std::vector<Vec3> positions;
  std::vector<cdouble> amplitudes;
  int size() const { return static_cast<int>(positions.size()); }
};

struct ScattererScene {
  std::vector<Vec3> positions;
  std::vector<cdouble> reflectivities;
  int size() const { return static_cast<int>(positions.size()); }
};

/// Solves the multiple-scattering system Q u = (G(omega, xe, y_j))_j with
/// Q_jl = delta_jl - (1 - delta_jl) G(omega, y_l, y_j) R_l, returning the
/// illumination vector u. Throws when cond(Q) exceeds the threshold.
CVector foldy_lax_solve(const ScattererScene& scene, double omega,
                        const Vec3& emitter, double c = 1.0,
                        double cond_threshold = 1e8);

enum class ForwardModel { sources, born, foldy_lax };

/// Exact (non-paraxial) Green's-function data for a source scene. Row layout
/// is frequency-major: index = l * Mr + r. Multi-frequency geometries apply
/// the common Gaussian pulse to every source amplitude. noise_level adds
/// circular complex Gaussian noise scaled to that relative l2 level.
CVector synthesize_data(const SourceScene& scene, const ImagingGeometry& geom,
                        double noise_level = 0.0, std::uint64_t seed = 0);

/// Scattering data for Born or Foldy-Lax forward models; requires an emitter.
CVector synthesize_data(const ScattererScene& scene, const ImagingGeometry& geom,
                        ForwardModel model, double noise_level = 0.0,
                        std::uint64_t seed = 0);

/// Adds seeded circular complex Gaussian noise with ||noise|| = level * ||d||.
CVector add_relative_noise(const CVector& d, double level, std::uint64_t seed);

}  // namespace sparseimg
