#pragma once

#include <cmath>
#include <optional>

#include "sparseimg/geometry.hpp"
#include "sparseimg/types.hpp"

namespace sparseimg {

enum class Regime { single_freq, broadband };

/// Constants of the closed-form resolution and coherence bounds. The single
/// frequency values follow the derivation; the broadband constant is an
/// empirical calibration (no closed form is available) validated by the
/// kernel coherence tests.
struct BoundConstants {
  double C_single = std::pow(1.5, 2.0 / 3.0) * (M_PI + 1.0);
  double C1 = 2.0;
  double C2 = 16.0;
  double C_broadband = 4.0;
};

struct ResolutionBounds {
  double h_star = 0.0;
  double h3_star = 0.0;
  Regime regime = Regime::single_freq;
};

/// Base resolution: the coarsest mesh with guaranteed exact two-source
/// recovery. single_freq: h* = (2/pi) lambda L / a, h3* = (16/pi) lambda
/// L^2 / a^2. broadband: h* unchanged, h3* = sqrt(2 ln 2) c / B.
ResolutionBounds base_resolution(const ImagingGeometry& geom, Regime regime);

struct MeshConditionReport {
  Regime regime = Regime::single_freq;
  int s = 0;
  double lhs = 0.0;  // mesh-dependent side of the inequality
  double rhs = 0.0;  // sparsity-dependent side
  double margin = 0.0;
  bool met = false;
  // single_freq only: (h/h*) / (h3/h3*), expected O(1) for the isotropic form
  double anisotropy_ratio = 0.0;
};

/// Sparsity-dependent mesh condition for exact recovery of s sources.
/// single_freq: [(h/h*)^2 (h3/h3*)]^(1/3) > C s^(2/3).
/// broadband: min(h/h*, h3/h3*) > C ln s.
MeshConditionReport sparsity_mesh_condition(const ImagingGeometry& geom, int s,
                                            Regime regime,
                                            const BoundConstants& constants = {});

/// Three-term upper bound on the paraxial-kernel cumulative coherence:
///   2^(5/3) C [s^2 / ((h/H)^2 (h3/H3))]^(1/3)
///   + C1 (H3/h3) ln s + C2 (H/h)^2 ln^2 s.
/// s is real-valued; the formula is continuous in the sparsity.
double paraxial_coherence_bound(double h_over_H, double h3_over_H3, double s,
                                const BoundConstants& constants = {});

struct FresnelBoundSet {
  std::optional<double> sinc_bound;  // eta == 0: min(1, 2/|beta|)
  std::optional<double> eta_bound;   // eta != 0: 2 sqrt(2) / sqrt(|eta|)
  std::optional<double> cone_bound;  // beta > alpha + eta, alpha,eta > 0: (pi+1)/alpha
};

/// Returns the applicable analytic bounds on U(beta, eta). Throws when a
/// requested cone bound is outside its applicability region.
FresnelBoundSet fresnel_bounds(double beta, double eta,
                               std::optional<double> alpha = std::nullopt);

}  // namespace sparseimg
