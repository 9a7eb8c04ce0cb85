#include "sparseimg/bounds.hpp"

#include <cmath>

namespace sparseimg {

ResolutionBounds base_resolution(const ImagingGeometry& geom, Regime regime) {
  const double a = geom.aperture(), L = geom.range(), lam = geom.wavelength();
  ResolutionBounds out;
  out.regime = regime;
  out.h_star = (2.0 / M_PI) * lam * L / a;
  if (regime == Regime::single_freq) {
    out.h3_star = (16.0 / M_PI) * lam * L * L / (a * a);
  } else {
    if (geom.bandwidth() <= 0.0)
      throw ConfigError("base_resolution: broadband regime requires B > 0");
    out.h3_star = std::sqrt(2.0 * std::log(2.0)) * geom.sound_speed() / geom.bandwidth();
  }
  return out;
}

MeshConditionReport sparsity_mesh_condition(const ImagingGeometry& geom, int s,
                                            Regime regime,
                                            const BoundConstants& constants) {
  if (s < 2) throw ConfigError("sparsity_mesh_condition: s must be >= 2");
  const ResolutionBounds base = base_resolution(geom, regime);
  const double rh = geom.mesh_h() / base.h_star;
  const double rh3 = geom.mesh_h3() / base.h3_star;

  MeshConditionReport rep;
  rep.regime = regime;
  rep.s = s;
  if (regime == Regime::single_freq) {
    rep.lhs = std::cbrt(rh * rh * rh3);
    rep.rhs = constants.C_single * std::pow(double(s), 2.0 / 3.0);
    rep.anisotropy_ratio = rh / rh3;
  } else {
    rep.lhs = std::min(rh, rh3);
    rep.rhs = constants.C_broadband * std::log(double(s));
  }
  rep.margin = rep.lhs - rep.rhs;
  rep.met = rep.lhs > rep.rhs;
  return rep;
}

double paraxial_coherence_bound(double h_over_H, double h3_over_H3, double s,
                                const BoundConstants& constants) {
  if (h_over_H <= 0.0 || h3_over_H3 <= 0.0)
    throw ConfigError("paraxial_coherence_bound: mesh ratios must be positive");
  if (s < 2.0) throw ConfigError("paraxial_coherence_bound: s must be >= 2");
  const double lns = std::log(s);
  const double first = std::pow(2.0, 5.0 / 3.0) * constants.C_single *
                       std::cbrt(s * s / (h_over_H * h_over_H * h3_over_H3));
  return first + constants.C1 * lns / h3_over_H3 +
         constants.C2 * lns * lns / (h_over_H * h_over_H);
}

FresnelBoundSet fresnel_bounds(double beta, double eta,
                               std::optional<double> alpha) {
  FresnelBoundSet out;
  if (eta == 0.0)
    out.sinc_bound = std::min(1.0, 2.0 / std::abs(beta));
  if (eta != 0.0)
    out.eta_bound = 2.0 * std::sqrt(2.0) / std::sqrt(std::abs(eta));
  if (alpha) {
    if (!(*alpha > 0.0 && eta > 0.0 && beta > *alpha + eta))
      throw ConfigError("fresnel_bounds: cone bound requires beta > alpha + eta with alpha, eta > 0");
    out.cone_bound = (M_PI + 1.0) / *alpha;
  }
  return out;
}

}  // namespace sparseimg
