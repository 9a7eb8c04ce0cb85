#include "sparseimg/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sparseimg::io {

namespace {

double length_scale(const json& j) {
  const std::string unit = j.value("unit", "lambda0");
  if (unit == "lambda0") return 1.0;
  if (unit == "meters") {
    if (!j.contains("wavelength_m"))
      throw ConfigError("geometry: unit 'meters' requires wavelength_m");
    const double wl = j.at("wavelength_m").get<double>();
    if (wl <= 0.0) throw ConfigError("geometry: wavelength_m must be positive");
    return 1.0 / wl;
  }
  throw ConfigError("geometry: unknown unit '" + unit + "'");
}

json complex_to_json(const cdouble& z) { return json::array({z.real(), z.imag()}); }

cdouble complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2)
    throw ConfigError("expected complex value as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error in " + path + ": " + e.what());
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << std::setw(2) << j << "\n";
}

GeometryConfig geometry_config_from_json(const json& j) {
  const double scale = length_scale(j);
  GeometryConfig c;
  try {
    c.aperture_a = j.at("aperture").get<double>() * scale;
    c.range_L = j.at("range").get<double>() * scale;
    c.window_D = j.at("window_d").get<double>() * scale;
    c.window_D2 = j.value("window_d2", 0.0) * scale;
    c.window_D3 = j.at("window_d3").get<double>() * scale;
    c.mesh_h = j.at("mesh_h").get<double>() * scale;
    c.mesh_h3 = j.at("mesh_h3").get<double>() * scale;
    c.array_spacing = j.at("array_spacing").get<double>() * scale;
  } catch (const json::out_of_range& e) {
    throw ConfigError(std::string("geometry: missing field: ") + e.what());
  }
  c.sound_speed = 1.0;
  const double frac = j.value("bandwidth_fraction", 0.0);
  if (frac < 0.0) throw ConfigError("geometry: bandwidth_fraction must be >= 0");
  c.bandwidth_B = frac * 2.0 * M_PI * c.sound_speed;  // omega0 = 2 pi c / lambda0
  c.omega_count = j.value("frequency_count", 1);
  c.omega_halfwidth_factor = j.value("omega_halfwidth_factor", 4.0);
  if (j.contains("emitter")) {
    const auto& e = j.at("emitter");
    if (!e.is_array() || e.size() != 3)
      throw ConfigError("geometry: emitter must be [x1, x2, x3]");
    c.emitter = Vec3(e[0].get<double>() * scale, e[1].get<double>() * scale,
                     e[2].get<double>() * scale);
  }
  return c;
}

json geometry_config_to_json(const GeometryConfig& c) {
  json j;
  j["unit"] = "lambda0";
  j["aperture"] = c.aperture_a;
  j["range"] = c.range_L;
  j["window_d"] = c.window_D;
  if (c.window_D2 > 0.0) j["window_d2"] = c.window_D2;
  j["window_d3"] = c.window_D3;
  j["mesh_h"] = c.mesh_h;
  j["mesh_h3"] = c.mesh_h3;
  j["array_spacing"] = c.array_spacing;
  j["bandwidth_fraction"] = c.bandwidth_B / (2.0 * M_PI * c.sound_speed);
  j["frequency_count"] = c.omega_count;
  j["omega_halfwidth_factor"] = c.omega_halfwidth_factor;
  if (c.emitter)
    j["emitter"] = json::array({(*c.emitter)[0], (*c.emitter)[1], (*c.emitter)[2]});
  return j;
}

SourceScene scene_from_json(const json& j) {
  SourceScene scene;
  if (!j.contains("sources") || !j.at("sources").is_array())
    throw ConfigError("scene: missing 'sources' array");
  for (const auto& s : j.at("sources")) {
    const auto& p = s.at("position");
    if (!p.is_array() || p.size() != 3)
      throw ConfigError("scene: position must be [z1, z2, z3]");
    scene.positions.emplace_back(p[0].get<double>(), p[1].get<double>(),
                                 p[2].get<double>());
    scene.amplitudes.push_back(s.contains("amplitude")
                                   ? complex_from_json(s.at("amplitude"))
                                   : cdouble(1.0, 0.0));
  }
  return scene;
}

json scene_to_json(const SourceScene& scene) {
  json arr = json::array();
  for (int i = 0; i < scene.size(); ++i) {
    json s;
    s["position"] = json::array({scene.positions[i][0], scene.positions[i][1],
                                 scene.positions[i][2]});
    s["amplitude"] = complex_to_json(scene.amplitudes[i]);
    arr.push_back(s);
  }
  return json{{"unit", "lambda0"}, {"sources", arr}};
}

void write_data_csv(const std::string& path, const CVector& d) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "index,real,imag\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < d.size(); ++i)
    out << i << "," << d[i].real() << "," << d[i].imag() << "\n";
}

CVector read_data_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<cdouble> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    std::getline(ls, tok, ',');
    const double re = std::stod(tok);
    std::getline(ls, tok, ',');
    const double im = std::stod(tok);
    vals.emplace_back(re, im);
  }
  CVector d(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) d[i] = vals[i];
  return d;
}

std::string hash_hex(std::uint64_t h) {
  std::ostringstream os;
  os << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

namespace {

std::string mode_name(SensingMode m) {
  switch (m) {
    case SensingMode::single_freq: return "single_freq";
    case SensingMode::multi_freq: return "multi_freq";
    case SensingMode::born: return "born";
  }
  return "single_freq";
}

SensingMode mode_from_name(const std::string& s) {
  if (s == "single_freq") return SensingMode::single_freq;
  if (s == "multi_freq") return SensingMode::multi_freq;
  if (s == "born") return SensingMode::born;
  throw ConfigError("unknown sensing mode '" + s + "'");
}

}  // namespace

void save_matrix(const SensingMatrix& m, const std::string& base) {
  json header;
  header["rows"] = m.rows();
  header["cols"] = m.cols();
  header["mode"] = mode_name(m.mode());
  header["model"] =
      m.model() == ModelKind::paraxial_model ? "paraxial" : "exact";
  header["layout"] = "row-major complex128";

  GeometryConfig c;
  const ImagingGeometry& g = m.geometry();
  c.aperture_a = g.aperture();
  c.range_L = g.range();
  c.window_D = g.window_d();
  c.window_D2 = g.window_d2();
  c.window_D3 = g.window_d3();
  c.mesh_h = g.mesh_h();
  c.mesh_h3 = g.mesh_h3();
  c.array_spacing = g.array_spacing();
  c.sound_speed = g.sound_speed();
  c.bandwidth_B = g.bandwidth();
  c.omega_count = g.omega_count();
  c.omega_halfwidth_factor = g.omega_halfwidth_factor();
  if (g.array().emitter) c.emitter = g.array().emitter;
  header["geometry"] = geometry_config_to_json(c);
  // Hash of the geometry as a loader will reconstruct it, so the check in
  // load_matrix is invariant to serialization rounding.
  header["geometry_hash"] = hash_hex(
      build_geometry(geometry_config_from_json(header["geometry"])).hash());

  json alpha = json::array();
  for (Eigen::Index j = 0; j < m.column_norms().size(); ++j)
    alpha.push_back(m.column_norms()[j]);
  header["alpha"] = alpha;
  json strip = json::array();
  for (Eigen::Index j = 0; j < m.phase_strip().size(); ++j)
    strip.push_back(complex_to_json(m.phase_strip()[j]));
  header["phase_strip"] = strip;

  write_json_file(base + ".json", header);

  std::ofstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot write " + base + ".bin");
  for (int r = 0; r < m.rows(); ++r)
    for (int cidx = 0; cidx < m.cols(); ++cidx) {
      const cdouble v = m.entries()(r, cidx);
      const double re = v.real(), im = v.imag();
      bin.write(reinterpret_cast<const char*>(&re), sizeof(re));
      bin.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
}

SensingMatrix load_matrix(const std::string& base) {
  const json header = read_json_file(base + ".json");
  const int rows = header.at("rows").get<int>();
  const int cols = header.at("cols").get<int>();
  const SensingMode mode = mode_from_name(header.at("mode").get<std::string>());
  const ModelKind model = header.value("model", "exact") == "paraxial"
                              ? ModelKind::paraxial_model
                              : ModelKind::exact_greens;
  const ImagingGeometry geom =
      build_geometry(geometry_config_from_json(header.at("geometry")));
  if (header.contains("geometry_hash") &&
      header.at("geometry_hash").get<std::string>() != hash_hex(geom.hash()))
    throw ConfigError("load_matrix: geometry hash mismatch in " + base);

  CMatrix entries(rows, cols);
  std::ifstream bin(base + ".bin", std::ios::binary);
  if (!bin) throw ConfigError("cannot open " + base + ".bin");
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double re = 0.0, im = 0.0;
      bin.read(reinterpret_cast<char*>(&re), sizeof(re));
      bin.read(reinterpret_cast<char*>(&im), sizeof(im));
      if (!bin) throw ConfigError("truncated matrix file " + base + ".bin");
      entries(r, c) = cdouble(re, im);
    }

  RVector alpha(cols);
  const auto& ja = header.at("alpha");
  for (int j = 0; j < cols; ++j) alpha[j] = ja[j].get<double>();
  CVector strip(cols);
  const auto& js = header.at("phase_strip");
  for (int j = 0; j < cols; ++j) strip[j] = complex_from_json(js[j]);

  return SensingMatrix::from_parts(std::move(entries), std::move(alpha),
                                   std::move(strip), mode, model, geom);
}

void write_offset_table_csv(const std::string& path, const GramKernel& kernel) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  const auto& counts = kernel.grid().counts();
  const Vec3 sp = kernel.grid().spacing();
  out << "dz1,dz2,dz3,modulus\n" << std::setprecision(12);
  for (int d3 = -(counts[2] - 1); d3 <= counts[2] - 1; ++d3)
    for (int d2 = -(counts[1] - 1); d2 <= counts[1] - 1; ++d2)
      for (int d1 = -(counts[0] - 1); d1 <= counts[0] - 1; ++d1)
        out << d1 * sp[0] << "," << d2 * sp[1] << "," << d3 * sp[2] << ","
            << kernel.modulus_offset(d1, d2, d3) << "\n";
}

json sparse_to_json(const SparseVector& v) {
  json support = json::array(), values = json::array();
  for (int i = 0; i < v.size(); ++i) {
    support.push_back(v.support[i]);
    values.push_back(complex_to_json(v.values[i]));
  }
  return json{{"support", support}, {"values", values}};
}

SparseVector sparse_from_json(const json& j) {
  SparseVector v;
  const auto& support = j.at("support");
  const auto& values = j.at("values");
  for (std::size_t i = 0; i < support.size(); ++i) {
    v.support.push_back(support[i].get<int>());
    v.values.push_back(complex_from_json(values[i]));
  }
  return v;
}

json result_to_json(const RecoveryResult& r) {
  json j;
  j["thresholded"] = sparse_to_json(r.rho_thresholded);
  j["residual_l2"] = r.residual_l2;
  j["objective"] = r.objective;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j;
}

void write_amplitude_csv(const std::string& path, const CVector& rho,
                         const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "index,i1,i2,i3,z1,z2,z3,abs,real,imag\n" << std::setprecision(12);
  for (int j = 0; j < grid.size(); ++j) {
    const auto c = grid.coords(j);
    const Vec3 z = grid.point(j);
    out << j << "," << c[0] << "," << c[1] << "," << c[2] << "," << z[0] << ","
        << z[1] << "," << z[2] << "," << std::abs(rho[j]) << ","
        << rho[j].real() << "," << rho[j].imag() << "\n";
  }
}

json coherence_to_json(const CoherenceReport& r) {
  json j;
  j["s"] = r.s;
  j["variant"] = r.variant == CoherenceVariant::sum_s_terms ? "sum_s_terms"
                                                            : "sum_s_minus_1_terms";
  j["mu"] = r.mu;
  j["argmax_column"] = r.argmax_column;
  j["argmax_set"] = r.argmax_set;
  return j;
}

json interaction_to_json(const InteractionReport& r) {
  json j;
  j["value"] = r.value;
  j["argmax_grid_point"] = [&r] {
    int arg = 0;
    r.per_point_sums.maxCoeff(&arg);
    return arg;
  }();
  return j;
}

void write_per_point_csv(const std::string& path, const InteractionReport& r,
                         const Grid& grid) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "index,z1,z2,z3,nearest_source,sum\n" << std::setprecision(12);
  for (int q = 0; q < grid.size(); ++q) {
    const Vec3 z = grid.point(q);
    out << q << "," << z[0] << "," << z[1] << "," << z[2] << ","
        << r.nearest_source[q] << "," << r.per_point_sums[q] << "\n";
  }
}

json ball_mass_to_json(const std::vector<BallMass>& table) {
  json arr = json::array();
  for (const auto& b : table) {
    json j;
    j["ball"] = b.ball;
    j["center"] = json::array({b.center[0], b.center[1], b.center[2]});
    j["radius"] = b.radius;
    j["l1_mass"] = b.l1_mass;
    j["entries"] = b.entry_count;
    arr.push_back(j);
  }
  return arr;
}

void write_ball_mass_csv(const std::string& path,
                         const std::vector<BallMass>& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "ball,z1,z2,z3,radius,l1_mass,entries\n" << std::setprecision(12);
  for (const auto& b : table)
    out << b.ball << "," << b.center[0] << "," << b.center[1] << ","
        << b.center[2] << "," << b.radius << "," << b.l1_mass << ","
        << b.entry_count << "\n";
}

}  // namespace sparseimg::io
