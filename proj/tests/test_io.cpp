#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "sparseimg/io.hpp"

using namespace sparseimg;
namespace fs = std::filesystem;

namespace {

std::string temp_dir() {
  const fs::path p = fs::temp_directory_path() / "sparseimg_io_test";
  fs::create_directories(p);
  return p.string();
}

io::json lambda_geometry() {
  return io::json{{"unit", "lambda0"}, {"aperture", 25.0},   {"range", 1000.0},
                  {"window_d", 8.0},   {"window_d3", 200.0}, {"mesh_h", 2.0},
                  {"mesh_h3", 100.0},  {"array_spacing", 2.5}};
}

}  // namespace

TEST_CASE("geometry config json round-trip") {
  const GeometryConfig c = io::geometry_config_from_json(lambda_geometry());
  CHECK(c.aperture_a == doctest::Approx(25.0));
  const io::json back = io::geometry_config_to_json(c);
  const GeometryConfig c2 = io::geometry_config_from_json(back);
  CHECK(build_geometry(c).hash() == build_geometry(c2).hash());
}

TEST_CASE("meter units rescale into lambda0 and are scale invariant") {
  io::json meters = lambda_geometry();
  meters["unit"] = "meters";
  meters["wavelength_m"] = 0.002;
  for (auto key : {"aperture", "range", "window_d", "window_d3", "mesh_h",
                   "mesh_h3", "array_spacing"})
    meters[key] = meters[key].get<double>() * 0.002;
  const GeometryConfig from_m = io::geometry_config_from_json(meters);
  const GeometryConfig from_l = io::geometry_config_from_json(lambda_geometry());
  CHECK(build_geometry(from_m).hash() == build_geometry(from_l).hash());

  meters.erase("wavelength_m");
  CHECK_THROWS_AS(io::geometry_config_from_json(meters), ConfigError);
}

TEST_CASE("scene json round-trip") {
  SourceScene scene;
  scene.positions = {Vec3(1.0, -2.0, 990.0), Vec3(0.0, 0.0, 1010.0)};
  scene.amplitudes = {cdouble(1.0, 0.5), cdouble(-0.25, 0.0)};
  const SourceScene back = io::scene_from_json(io::scene_to_json(scene));
  REQUIRE(back.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK((back.positions[i] - scene.positions[i]).norm() == 0.0);
    CHECK(back.amplitudes[i] == scene.amplitudes[i]);
  }
  CHECK_THROWS_AS(io::scene_from_json(io::json{{"foo", 1}}), ConfigError);
}

TEST_CASE("data csv round-trip") {
  const std::string path = temp_dir() + "/data.csv";
  CVector d(5);
  d << cdouble(1.0, -2.0), cdouble(0.0, 0.0), cdouble(-3.25, 0.5),
      cdouble(1e-14, 2.0), cdouble(7.0, 7.0);
  io::write_data_csv(path, d);
  const CVector back = io::read_data_csv(path);
  REQUIRE(back.size() == 5);
  CHECK((back - d).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("matrix save and load round-trip") {
  const GeometryConfig c = io::geometry_config_from_json(lambda_geometry());
  const ImagingGeometry g = build_geometry(c);
  const SensingMatrix m = assemble_exact(g, SensingMode::single_freq);
  const std::string base = temp_dir() + "/matrix";
  io::save_matrix(m, base);
  const SensingMatrix back = io::load_matrix(base);

  CHECK(back.rows() == m.rows());
  CHECK(back.cols() == m.cols());
  CHECK(back.mode() == m.mode());
  CHECK(back.model() == m.model());
  CHECK((back.entries() - m.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.column_norms() - m.column_norms()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.phase_strip() - m.phase_strip()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.geometry().hash() == m.geometry().hash());
}

TEST_CASE("sparse vector and result json") {
  SparseVector v;
  v.support = {3, 9};
  v.values = {cdouble(0.5, -0.5), cdouble(2.0, 0.0)};
  const SparseVector back = io::sparse_from_json(io::sparse_to_json(v));
  CHECK(back.support == v.support);
  CHECK(back.values[1] == v.values[1]);

  RecoveryResult r;
  r.rho_star = v.to_dense(12);
  r.rho_thresholded = v;
  r.residual_l2 = 1e-9;
  r.iterations = 42;
  r.converged = true;
  const io::json j = io::result_to_json(r);
  CHECK(j["iterations"] == 42);
  CHECK(j["converged"] == true);
}

TEST_CASE("csv table writers produce headers") {
  const GeometryConfig c = io::geometry_config_from_json(lambda_geometry());
  const ImagingGeometry g = build_geometry(c);
  const GramKernel kernel(g, GramKernel::Kind::paraxial);
  const std::string dir = temp_dir();

  io::write_offset_table_csv(dir + "/offsets.csv", kernel);
  std::ifstream in(dir + "/offsets.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "dz1,dz2,dz3,modulus");

  CVector rho = CVector::Zero(g.grid().size());
  io::write_amplitude_csv(dir + "/amp.csv", rho, g.grid());
  std::ifstream in2(dir + "/amp.csv");
  std::getline(in2, header);
  CHECK(header == "index,i1,i2,i3,z1,z2,z3,abs,real,imag");
}
