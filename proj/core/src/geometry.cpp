#include "sparseimg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace sparseimg {

namespace {

int cell_count(double extent, double step, const char* axis) {
  if (step <= 0.0) throw ConfigError(std::string("mesh step must be positive on ") + axis);
  if (extent <= 0.0) throw ConfigError(std::string("window extent must be positive on ") + axis);
  const double ratio = extent / step;
  const int n = static_cast<int>(std::lround(ratio));
  if (n < 1) throw ConfigError(std::string("mesh larger than window on ") + axis);
  if (std::abs(n - ratio) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError(std::string("mesh does not divide window extent on ") + axis);
  return n;
}

void hash_mix(std::uint64_t& h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= 0x100000001b3ull;
  }
}

}  // namespace

Grid::Grid(std::array<int, 3> counts, Vec3 origin, Vec3 spacing)
    : counts_(counts), origin_(origin), spacing_(spacing) {}

std::array<int, 3> Grid::coords(int j) const {
  const int i1 = j % counts_[0];
  const int i2 = (j / counts_[0]) % counts_[1];
  const int i3 = j / (counts_[0] * counts_[1]);
  return {i1, i2, i3};
}

Vec3 Grid::point(int j) const {
  const auto c = coords(j);
  return point(c[0], c[1], c[2]);
}

Vec3 Grid::point(int i1, int i2, int i3) const {
  return origin_ + Vec3(i1 * spacing_[0], i2 * spacing_[1], i3 * spacing_[2]);
}

int Grid::nearest_index(const Vec3& y) const {
  std::array<int, 3> idx;
  for (int k = 0; k < 3; ++k) {
    const int i = static_cast<int>(std::lround((y[k] - origin_[k]) / spacing_[k]));
    idx[k] = std::clamp(i, 0, counts_[k] - 1);
  }
  return index(idx[0], idx[1], idx[2]);
}

double ImagingGeometry::pulse(double omega) const {
  if (omegas_.size() <= 1 || B_ <= 0.0) return 1.0;
  const double d = omega - omega0_;
  return std::exp(-d * d / (4.0 * B_ * B_));
}

double ImagingGeometry::pulse_norm() const {
  double s = 0.0;
  for (double w : omegas_) {
    const double f = pulse(w);
    s += f * f;
  }
  return std::sqrt(s);
}

std::uint64_t ImagingGeometry::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (double v : {a_, L_, D_, D2_, D3_, h_, h3_, hA_, c_, B_, omega0_,
                   static_cast<double>(omegas_.size())})
    hash_mix(h, v);
  if (array_.emitter) {
    hash_mix(h, (*array_.emitter)[0]);
    hash_mix(h, (*array_.emitter)[1]);
    hash_mix(h, (*array_.emitter)[2]);
  }
  return h;
}

ImagingGeometry build_geometry(const GeometryConfig& config) {
  if (config.aperture_a <= 0.0) throw ConfigError("aperture must be positive");
  if (config.range_L <= 0.0) throw ConfigError("range must be positive");
  if (config.array_spacing <= 0.0) throw ConfigError("array spacing must be positive");
  if (config.sound_speed <= 0.0) throw ConfigError("sound speed must be positive");
  if (config.omega_count < 1) throw ConfigError("at least one frequency required");
  if (config.omega_count > 1 && config.bandwidth_B <= 0.0)
    throw ConfigError("multi-frequency geometry requires a positive bandwidth");

  ImagingGeometry g;
  g.a_ = config.aperture_a;
  g.L_ = config.range_L;
  g.D_ = config.window_D;
  g.D2_ = config.window_D2 > 0.0 ? config.window_D2 : config.window_D;
  g.D3_ = config.window_D3;
  g.h_ = config.mesh_h;
  g.h3_ = config.mesh_h3;
  g.hA_ = config.array_spacing;
  g.c_ = config.sound_speed;
  g.B_ = config.bandwidth_B;
  g.lambda0_ = 1.0;  // internal unit
  g.omega0_ = 2.0 * M_PI * g.c_ / g.lambda0_;

  const int n1 = cell_count(g.D_, g.h_, "z1");
  const int n2 = cell_count(g.D2_, g.h_, "z2");
  const int n3 = cell_count(g.D3_, g.h3_, "z3");
  const Vec3 origin(-0.5 * g.D_ + 0.5 * g.h_, -0.5 * g.D2_ + 0.5 * g.h_,
                    g.L_ - 0.5 * g.D3_ + 0.5 * g.h3_);
  g.grid_ = Grid({n1, n2, n3}, origin, Vec3(g.h_, g.h_, g.h3_));

  // Receiver lattice: floor(a/h_A)+1 points per axis starting at -a/2, so
  // both endpoints are included when a/h_A is integral.
  const int mr = static_cast<int>(std::floor(g.a_ / g.hA_ + 1e-12)) + 1;
  g.array_.per_axis = mr;
  g.array_.receivers.reserve(static_cast<std::size_t>(mr) * mr);
  for (int i2 = 0; i2 < mr; ++i2)
    for (int i1 = 0; i1 < mr; ++i1)
      g.array_.receivers.emplace_back(-0.5 * g.a_ + i1 * g.hA_,
                                      -0.5 * g.a_ + i2 * g.hA_);
  g.array_.emitter = config.emitter;

  g.omega_halfwidth_factor_ = config.omega_halfwidth_factor;
  if (config.omega_count == 1) {
    g.omegas_ = {g.omega0_};
  } else {
    const double half = config.omega_halfwidth_factor * g.B_;
    const int m = config.omega_count;
    g.omegas_.resize(m);
    for (int i = 0; i < m; ++i)
      g.omegas_[i] = g.omega0_ - half + 2.0 * half * i / (m - 1);
  }
  for (double w : g.omegas_)
    if (w <= 0.0) throw ConfigError("frequency sampling reaches non-positive omega; reduce bandwidth or halfwidth factor");

  return g;
}

RegimeReport check_paraxial_regime(const ImagingGeometry& geom,
                                   double small_threshold,
                                   double large_threshold) {
  const double a = geom.aperture(), L = geom.range(),
               D = std::max(geom.window_d(), geom.window_d2()),
               D3 = geom.window_d3(), lam = geom.wavelength();
  const double fresnel = a * a / (lam * L);

  RegimeReport rep;
  rep.small_threshold = small_threshold;
  rep.large_threshold = large_threshold;
  auto add = [&rep](const std::string& name, double value, bool wants_small) {
    rep.ratios.push_back({name, value, wants_small, false});
  };
  add("a^2/(lambda L)", fresnel, false);
  add("a^2/(lambda L) * D3/L", fresnel * D3 / L, false);
  add("D^2/(lambda L)", D * D / (lam * L), true);
  add("a^2/(lambda L) * aD/L^2", fresnel * a * D / (L * L), true);
  add("a^2/(lambda L) * (D3/L)^2", fresnel * (D3 / L) * (D3 / L), true);
  add("a^2/(lambda L) * (a/L)^2 * D3/L",
      fresnel * (a / L) * (a / L) * (D3 / L), true);

  rep.pass = true;
  for (auto& r : rep.ratios) {
    r.pass = r.wants_small ? (r.value < small_threshold)
                           : (r.value >= large_threshold);
    rep.pass = rep.pass && r.pass;
  }
  return rep;
}

SamplingReport check_array_sampling(const ImagingGeometry& geom,
                                    double small_threshold) {
  const double a = geom.aperture(), L = geom.range(),
               D = std::max(geom.window_d(), geom.window_d2()),
               D3 = geom.window_d3(), lam = geom.wavelength(),
               hA = geom.array_spacing();
  SamplingReport rep;
  rep.small_threshold = small_threshold;
  rep.margin_cross = (lam * L / D) / hA;
  rep.margin_range = (lam * L * L / (a * D3)) / hA;
  rep.aperture_ok = rep.margin_cross >= 1.0 / small_threshold &&
                    rep.margin_range >= 1.0 / small_threshold;
  // For non-square windows D enters through the geometric mean, keeping
  // the equivalence with M_r < N.
  const double dgm = std::sqrt(geom.window_d() * geom.window_d2());
  const double rhs =
      a * (geom.mesh_h() / dgm) * std::sqrt(geom.mesh_h3() / D3);
  rep.underdetermined_margin = hA / rhs;
  rep.underdetermined = hA > rhs;
  return rep;
}

}  // namespace sparseimg
