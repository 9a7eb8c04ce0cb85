#include <benchmark/benchmark.h>

#include "sparseimg/bounds.hpp"
#include "sparseimg/coherence.hpp"
#include "sparseimg/fresnel.hpp"
#include "sparseimg/solver.hpp"

using namespace sparseimg;

namespace {

GeometryConfig bench_config(double h_factor, int n, int n3) {
  GeometryConfig c;
  c.aperture_a = 25.0;
  c.range_L = 1000.0;
  c.mesh_h = h_factor * (2.0 / M_PI) * 40.0;
  c.mesh_h3 = (16.0 / M_PI) * 1600.0;
  c.window_D = n * c.mesh_h;
  c.window_D3 = n3 * c.mesh_h3;
  c.array_spacing = 2.5;
  return c;
}

void BM_FresnelU(benchmark::State& state) {
  const double beta = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fresnel_u(beta, 0.5 * beta));
}
BENCHMARK(BM_FresnelU)->Arg(4)->Arg(40)->Arg(120);

void BM_AssembleParaxialModel(benchmark::State& state) {
  const ImagingGeometry g =
      build_geometry(bench_config(1.0, static_cast<int>(state.range(0)), 4));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_paraxial_model(g));
}
BENCHMARK(BM_AssembleParaxialModel)->Arg(6)->Arg(10);

void BM_KernelCoherence(benchmark::State& state) {
  const ImagingGeometry g =
      build_geometry(bench_config(1.2, static_cast<int>(state.range(0)), 8));
  const GramKernel kernel(g, GramKernel::Kind::paraxial);
  for (auto _ : state)
    benchmark::DoNotOptimize(cumulative_coherence(kernel, 8).mu);
}
BENCHMARK(BM_KernelCoherence)->Arg(8)->Arg(16);

void BM_BasisPursuit(benchmark::State& state) {
  const ImagingGeometry g =
      build_geometry(bench_config(1.6, static_cast<int>(state.range(0)), 1));
  const SensingMatrix m = assemble_paraxial_model(g);
  SparseVector truth;
  truth.support = {0, m.cols() / 2};
  truth.values = {cdouble(1.0, 0.0), cdouble(0.0, 1.0)};
  const CVector d = m.apply(truth);
  SolveSettings s;
  s.tol_primal = s.tol_dual = 1e-7;
  for (auto _ : state) benchmark::DoNotOptimize(basis_pursuit(m, d, s));
}
BENCHMARK(BM_BasisPursuit)->Arg(6)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
