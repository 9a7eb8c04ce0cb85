#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "sparseimg/types.hpp"

namespace sparseimg {

/// Raw geometry parameters. All lengths are in units of the center
/// wavelength lambda0; I/O layers convert from meters before building.
struct GeometryConfig {
  double aperture_a = 0.0;
  double range_L = 0.0;
  double window_D = 0.0;
  double window_D2 = 0.0;  // second cross-range extent; 0 means square (= window_D)
  double window_D3 = 0.0;
  double mesh_h = 0.0;
  double mesh_h3 = 0.0;
  double array_spacing = 0.0;
  double sound_speed = 1.0;
  // Bandwidth as an angular-frequency scale; 0 selects single frequency.
  double bandwidth_B = 0.0;
  int omega_count = 1;
  // Frequencies sample [omega0 - f*B, omega0 + f*B] with f this factor.
  double omega_halfwidth_factor = 4.0;
  std::optional<Vec3> emitter;
};

/// Regular lattice of cell centers filling the imaging window.
class Grid {
 public:
  Grid() = default;
  Grid(std::array<int, 3> counts, Vec3 origin, Vec3 spacing);

  int size() const { return counts_[0] * counts_[1] * counts_[2]; }
  const std::array<int, 3>& counts() const { return counts_; }
  const Vec3& spacing() const { return spacing_; }

  int index(int i1, int i2, int i3) const {
    return (i3 * counts_[1] + i2) * counts_[0] + i1;
  }
  std::array<int, 3> coords(int j) const;
  Vec3 point(int j) const;
  Vec3 point(int i1, int i2, int i3) const;

  /// Grid index of the lattice point nearest to y (clamped to the window).
  int nearest_index(const Vec3& y) const;

 private:
  std::array<int, 3> counts_{1, 1, 1};
  Vec3 origin_ = Vec3::Zero();  // position of the (0,0,0) cell center
  Vec3 spacing_ = Vec3::Ones();
};

/// Square receiver lattice in the z3 = 0 plane, optional emitter.
struct ArrayLayout {
  std::vector<Vec2> receivers;
  std::optional<Vec3> emitter;
  int per_axis = 0;
};

class ImagingGeometry {
 public:
  ImagingGeometry() = default;

  double aperture() const { return a_; }
  double range() const { return L_; }
  double window_d() const { return D_; }
  double window_d2() const { return D2_; }
  double window_d3() const { return D3_; }
  double mesh_h() const { return h_; }
  double mesh_h3() const { return h3_; }
  double array_spacing() const { return hA_; }
  double wavelength() const { return lambda0_; }
  double sound_speed() const { return c_; }
  double bandwidth() const { return B_; }
  double omega_halfwidth_factor() const { return omega_halfwidth_factor_; }
  double center_omega() const { return omega0_; }
  double center_wavenumber() const { return omega0_ / c_; }
  const std::vector<double>& frequencies() const { return omegas_; }
  int omega_count() const { return static_cast<int>(omegas_.size()); }

  const Grid& grid() const { return grid_; }
  const ArrayLayout& array() const { return array_; }
  int receiver_count() const { return static_cast<int>(array_.receivers.size()); }
  int measurement_count() const { return receiver_count() * omega_count(); }

  Vec3 receiver3(int r) const {
    return Vec3(array_.receivers[r][0], array_.receivers[r][1], 0.0);
  }

  /// Gaussian pulse amplitude at omega; identically 1 for single frequency.
  double pulse(double omega) const;
  /// l2 norm of the pulse over the stored frequencies.
  double pulse_norm() const;

  /// FNV-1a hash of the defining parameters, for report provenance.
  std::uint64_t hash() const;

  friend ImagingGeometry build_geometry(const GeometryConfig& config);

 private:
  double a_ = 0.0, L_ = 0.0, D_ = 0.0, D2_ = 0.0, D3_ = 0.0;
  double h_ = 0.0, h3_ = 0.0, hA_ = 0.0;
  double lambda0_ = 1.0, c_ = 1.0, B_ = 0.0, omega0_ = 0.0;
  double omega_halfwidth_factor_ = 4.0;
  std::vector<double> omegas_;
  Grid grid_;
  ArrayLayout array_;
};

/// Validates the configuration and derives the grid, the receiver lattice
/// and the frequency samples. Throws ConfigError on bad input.
ImagingGeometry build_geometry(const GeometryConfig& config);

struct RegimeRatio {
  std::string name;
  double value = 0.0;
  bool wants_small = true;  // "<< 1" checks; otherwise ">~ 1"
  bool pass = false;
};

struct RegimeReport {
  std::vector<RegimeRatio> ratios;
  double small_threshold = 0.1;
  double large_threshold = 1.0;
  bool pass = false;
};

/// Evaluates the paraxial scaling ratios. "<<" and ">~" are operationalized
/// by the two thresholds; the report always carries every ratio so failed
/// checks surface as warnings rather than errors.
RegimeReport check_paraxial_regime(const ImagingGeometry& geom,
                                   double small_threshold = 0.1,
                                   double large_threshold = 1.0);

struct SamplingReport {
  // Continuous-aperture validity: h_A << lambda L / D and << lambda L^2 / (a D3).
  double margin_cross = 0.0;  // (lambda L / D) / h_A
  double margin_range = 0.0;  // (lambda L^2 / (a D3)) / h_A
  bool aperture_ok = false;
  // Underdetermined system: h_A > a (h/D) sqrt(h3/D3), i.e. M_r < N.
  double underdetermined_margin = 0.0;  // h_A / rhs
  bool underdetermined = false;
  double small_threshold = 0.1;
};

SamplingReport check_array_sampling(const ImagingGeometry& geom,
                                    double small_threshold = 0.1);

}  // namespace sparseimg
