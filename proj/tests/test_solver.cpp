#include <doctest.h>

#include <random>

#include "sparseimg/coherence.hpp"
#include "sparseimg/solver.hpp"
#include "support/oracles.hpp"

using namespace sparseimg;

namespace {

// Coarse physical geometry with comfortably low coherence.
GeometryConfig coarse_config() {
  GeometryConfig c;
  c.aperture_a = 25.0;
  c.range_L = 1000.0;
  const double hstar = (2.0 / M_PI) * 40.0;
  c.mesh_h = 1.6 * hstar;
  c.window_D = 5 * c.mesh_h;
  c.mesh_h3 = 150.0;
  c.window_D3 = 2 * c.mesh_h3;
  c.array_spacing = 2.5;
  return c;
}

CMatrix random_unit_columns(int m, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMatrix a(m, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) a(i, j) = cdouble(gauss(rng), gauss(rng));
    a.col(j) /= a.col(j).norm();
  }
  return a;
}

}  // namespace

TEST_CASE("complex soft threshold preserves phases") {
  CVector x(4);
  x << cdouble(3.0, 4.0), cdouble(0.1, -0.1), cdouble(-2.0, 0.0), cdouble(0, 0);
  const CVector y = complex_soft_threshold(x, 1.0);
  CHECK(std::abs(y[0]) == doctest::Approx(4.0));
  // same phase: y = c x with c >= 0 real
  const cdouble ratio = y[0] / x[0];
  CHECK(ratio.imag() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ratio.real() > 0.0);
  CHECK(std::abs(y[1]) == doctest::Approx(0.0));  // shrunk to zero
  CHECK(y[2].real() == doctest::Approx(-1.0));
  CHECK(std::abs(y[3]) == 0.0);
}

TEST_CASE("threshold keeps the max and the boundary") {
  CVector rho(4);
  rho << cdouble(1.0, 0.0), cdouble(0.01, 0.0), cdouble(0.0099, 0.0), cdouble(0, 0);
  const SparseVector t = threshold(rho, 0.01);
  REQUIRE(t.size() == 2);
  CHECK(t.support[0] == 0);
  CHECK(t.support[1] == 1);  // exactly at the threshold: kept

  CHECK(threshold(CVector::Zero(5), 0.01).size() == 0);
  CHECK_THROWS_AS(threshold(rho, 1.0), ConfigError);
}

TEST_CASE("basis pursuit: zero data gives the zero solution") {
  const CMatrix a = random_unit_columns(6, 12, 1);
  const RecoveryResult res = basis_pursuit(a, CVector::Zero(6));
  CHECK(res.converged);
  CHECK(res.rho_star.norm() == doctest::Approx(0.0));
}

TEST_CASE("basis pursuit recovers a single column") {
  const ImagingGeometry g = build_geometry(coarse_config());
  const SensingMatrix m = assemble_exact(g, SensingMode::single_freq);
  REQUIRE(cumulative_coherence(m, 2).mu < 0.5);

  const int j = 13;
  const CVector d = m.entries().col(j);
  const RecoveryResult res = basis_pursuit(m, d);
  CHECK(res.converged);
  CVector expected = CVector::Zero(m.cols());
  expected[j] = 1.0;
  CHECK((res.rho_star - expected).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(res.residual_l2 <= 1e-6 * d.norm());
}

TEST_CASE("basis pursuit recovers an s-sparse on-grid scene under mu < 1/2") {
  const ImagingGeometry g = build_geometry(coarse_config());
  const SensingMatrix m = assemble_exact(g, SensingMode::single_freq);
  REQUIRE(cumulative_coherence(m, 3).mu < 0.5);

  SourceScene scene;
  scene.positions = {g.grid().point(4), g.grid().point(22), g.grid().point(41)};
  scene.amplitudes = {cdouble(1.0, 0.0), cdouble(-0.5, 0.8), cdouble(0.0, 1.3)};
  const CVector d = synthesize_data(scene, g);
  const RecoveryResult res = basis_pursuit(m, d);
  const CVector truth = m.truth_vector(scene).to_dense(m.cols());
  const CVector approx = res.rho_thresholded.to_dense(m.cols());
  CHECK(recovery_error_inf(approx, truth) < 0.01);
}

TEST_CASE("basis pursuit solutions commute with diagonal unitary scaling") {
  const CMatrix a = random_unit_columns(8, 16, 5);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
  CVector z(16);
  for (int j = 0; j < 16; ++j) z[j] = std::polar(1.0, uni(rng));
  CMatrix az = a;
  for (int j = 0; j < 16; ++j) az.col(j) *= z[j];

  CVector rho = CVector::Zero(16);
  rho[3] = cdouble(1.0, -0.5);
  const CVector d = a * rho;

  const RecoveryResult plain = basis_pursuit(a, d);
  const RecoveryResult scaled = basis_pursuit(az, d);
  // map back: rho = Z rho'
  const CVector mapped = z.asDiagonal() * scaled.rho_star;
  CHECK((plain.rho_star - mapped).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("basis pursuit rejects data outside the range") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const CMatrix a = random_unit_columns(6, 3, 2);  // tall: range is a subspace
  CVector d(6);
  for (int i = 0; i < 6; ++i) d[i] = cdouble(gauss(rng), gauss(rng));
  CHECK_THROWS_AS(basis_pursuit(a, d), InfeasibleError);
}

TEST_CASE("basis pursuit matches the exhaustive-support oracle") {
  int done = 0;
  for (std::uint64_t seed = 0; done < 5 && seed < 60; ++seed) {
    const CMatrix a = random_unit_columns(16, 16, 1000 + seed);
    if (cumulative_coherence(a, 2).mu >= 0.5) continue;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 15);
    const int j = pick(rng);
    int q = pick(rng);
    while (q == j) q = pick(rng);
    CVector rho = CVector::Zero(16);
    rho[j] = cdouble(1.2, -0.3);
    rho[q] = cdouble(-0.4, 0.9);
    const CVector d = a * rho;

    const RecoveryResult res = basis_pursuit(a, d);
    const Eigen::VectorXcd oracle = testsupport::sparsest_solution(a, d, 2);
    REQUIRE(oracle.size() == 16);
    CHECK((res.rho_star - oracle).cwiseAbs().maxCoeff() < 1e-4);
    ++done;
  }
  CHECK(done == 5);
}

TEST_CASE("penalty with gamma = 0 solves least squares") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const CMatrix a = random_unit_columns(20, 8, 3);
  CVector d(20);
  for (int i = 0; i < 20; ++i) d[i] = cdouble(gauss(rng), gauss(rng));

  SolveSettings s;
  s.gamma = 0.0;
  s.tol_primal = 1e-12;
  const RecoveryResult res = l1_penalty(a, d, s);
  const CVector normal = (a.adjoint() * a).ldlt().solve(a.adjoint() * d);
  CHECK((res.rho_star - normal).cwiseAbs().maxCoeff() < 1e-6);
  // objective gradient nearly zero
  CHECK((a.adjoint() * (a * res.rho_star - d)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("penalty with gamma >= ||A^H d||_inf returns zero") {
  const CMatrix a = random_unit_columns(10, 14, 4);
  CVector rho = CVector::Zero(14);
  rho[2] = 1.0;
  const CVector d = a * rho;
  SolveSettings s;
  s.gamma = (a.adjoint() * d).cwiseAbs().maxCoeff() * 1.0000001;
  const RecoveryResult res = l1_penalty(a, d, s);
  CHECK(res.converged);
  CHECK(res.rho_star.norm() == doctest::Approx(0.0));
}

TEST_CASE("penalty objective is non-increasing with iteration count") {
  const CMatrix a = random_unit_columns(12, 24, 8);
  CVector rho = CVector::Zero(24);
  rho[1] = cdouble(1.0, 0.0);
  rho[17] = cdouble(0.0, -0.8);
  const CVector d = a * rho;
  SolveSettings s;
  s.gamma = 0.05;
  double prev = HUGE_VAL;
  for (int iters : {3, 6, 12, 25, 50, 100}) {
    s.max_iters = iters;
    const double obj = l1_penalty(a, d, s).objective;
    CHECK(obj <= prev + 1e-12);
    prev = obj;
  }
}

TEST_CASE("penalty via normal equations matches the matrix path") {
  const CMatrix a = random_unit_columns(15, 20, 12);
  CVector rho = CVector::Zero(20);
  rho[4] = cdouble(0.9, 0.1);
  rho[11] = cdouble(-0.2, 0.6);
  const CVector d = a * rho;
  SolveSettings s;
  s.gamma = 0.02;
  const RecoveryResult via_matrix = l1_penalty(a, d, s);
  const RecoveryResult via_normal = l1_penalty_normal(
      a.adjoint() * a, a.adjoint() * d, d.squaredNorm(), s);
  CHECK((via_matrix.rho_star - via_normal.rho_star).cwiseAbs().maxCoeff() < 1e-7);
  CHECK(via_matrix.residual_l2 == doctest::Approx(via_normal.residual_l2).epsilon(1e-6));
}

TEST_CASE("constrained denoiser hits the residual target") {
  const ImagingGeometry g = build_geometry(coarse_config());
  const SensingMatrix m = assemble_exact(g, SensingMode::single_freq);
  SourceScene scene;
  scene.positions = {g.grid().point(7), g.grid().point(30)};
  scene.amplitudes = {cdouble(1.0, 0.0), cdouble(0.7, -0.7)};
  const CVector clean = synthesize_data(scene, g);
  const CVector noisy = synthesize_data(scene, g, 0.1, 77);
  const double level = 0.1 * clean.norm();

  const RecoveryResult res = constrained_denoise(m.entries(), noisy, level);
  CHECK(res.residual_l2 >= 0.98 * level);
  CHECK(res.residual_l2 <= 1.02 * level);
}

TEST_CASE("constrained denoiser edge cases") {
  const CMatrix a = random_unit_columns(8, 12, 21);
  CVector rho = CVector::Zero(12);
  rho[5] = 1.0;
  const CVector d = a * rho;

  // zero level reduces to basis pursuit
  const RecoveryResult bp = constrained_denoise(a, d, 0.0);
  CHECK((bp.rho_star - rho).cwiseAbs().maxCoeff() < 1e-5);

  // level above ||d||: the origin is feasible and optimal
  const RecoveryResult zero = constrained_denoise(a, d, 2.0 * d.norm());
  CHECK(zero.rho_star.norm() == doctest::Approx(0.0));
  CHECK(zero.residual_l2 == doctest::Approx(d.norm()));
}

TEST_CASE("solver settings validation") {
  const CMatrix a = random_unit_columns(4, 6, 30);
  const CVector d = a.col(0);
  SolveSettings s;
  s.gamma = -1.0;
  CHECK_THROWS_AS(l1_penalty(a, d, s), ConfigError);
  CHECK_THROWS_AS(constrained_denoise(a, d, -0.5), ConfigError);
}
