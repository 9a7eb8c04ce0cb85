#include "sparseimg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <thread>

#include "sparseimg/bounds.hpp"

namespace sparseimg {

using io::json;

namespace {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex err_mutex;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::uint64_t resolve_seed(const json& config, const RunOptions& opts,
                           bool required) {
  if (opts.seed) return *opts.seed;
  if (config.contains("seed")) return config.at("seed").get<std::uint64_t>();
  if (required)
    throw ConfigError("a seed is mandatory for randomized scenes (config \"seed\" or --seed)");
  return 0;
}

ImagingGeometry geom_from_config(const json& config) {
  if (!config.contains("geometry"))
    throw ConfigError("config: missing \"geometry\" section");
  return build_geometry(io::geometry_config_from_json(config.at("geometry")));
}

SensingMatrix matrix_from_config(const json& config, const ImagingGeometry& geom) {
  const std::string model = config.value("model", "exact");
  if (model == "paraxial") return assemble_paraxial_model(geom);
  if (model != "exact") throw ConfigError("config: model must be \"exact\" or \"paraxial\"");
  const std::string mode = config.value("mode", "single_freq");
  if (mode == "single_freq") return assemble_exact(geom, SensingMode::single_freq);
  if (mode == "multi_freq") return assemble_exact(geom, SensingMode::multi_freq);
  if (mode == "born") return assemble_exact(geom, SensingMode::born);
  throw ConfigError("config: unknown mode \"" + mode + "\"");
}

SolveSettings settings_from_config(const json& config) {
  SolveSettings s;
  if (!config.contains("solver")) return s;
  const json& j = config.at("solver");
  s.max_iters = j.value("max_iters", s.max_iters);
  s.tol_primal = j.value("tol_primal", s.tol_primal);
  s.tol_dual = j.value("tol_dual", s.tol_dual);
  s.admm_rho = j.value("admm_rho", s.admm_rho);
  s.admm_relax = j.value("admm_relax", s.admm_relax);
  s.fista_step = j.value("fista_step", s.fista_step);
  s.gamma = j.value("gamma", s.gamma);
  s.threshold_fraction = j.value("threshold_fraction", s.threshold_fraction);
  s.feas_tol = j.value("feas_tol", s.feas_tol);
  return s;
}

cdouble draw_amplitude(const std::string& kind, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  if (kind == "unit") return {1.0, 0.0};
  if (kind == "random_phase") return std::polar(1.0, 2.0 * M_PI * uni(rng));
  if (kind == "random")
    return std::polar(0.5 + uni(rng), 2.0 * M_PI * uni(rng));
  throw ConfigError("scene: unknown amplitude kind \"" + kind + "\"");
}

SourceScene generate_scene(const json& gen, const Grid& grid, std::uint64_t seed,
                           const ColumnOracle* oracle) {
  const int count = gen.at("count").get<int>();
  const bool on_grid = gen.value("on_grid", true);
  const std::string amp_kind = gen.value("amplitude", "unit");
  const double min_sep = gen.value("min_pairwise_semi_metric", 0.0);
  const int margin = gen.value("margin_cells", 0);
  if (min_sep > 0.0 && !oracle)
    throw ConfigError("scene: separation constraint needs a column oracle");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const auto& counts = grid.counts();
  for (int k = 0; k < 3; ++k)
    if (counts[k] <= 2 * margin)
      throw ConfigError("scene: margin_cells leaves no room in the window");

  for (int attempt = 0; attempt < 500; ++attempt) {
    SourceScene scene;
    std::vector<int> used;
    while (scene.size() < count) {
      Vec3 pos;
      if (on_grid) {
        std::array<int, 3> c;
        for (int k = 0; k < 3; ++k)
          c[k] = margin + static_cast<int>(uni(rng) * (counts[k] - 2 * margin));
        const int j = grid.index(std::min(c[0], counts[0] - 1 - margin),
                                 std::min(c[1], counts[1] - 1 - margin),
                                 std::min(c[2], counts[2] - 1 - margin));
        if (std::find(used.begin(), used.end(), j) != used.end()) continue;
        used.push_back(j);
        pos = grid.point(j);
      } else {
        for (int k = 0; k < 3; ++k) {
          const double lo = margin, hi = counts[k] - 1.0 - margin;
          const double cell = lo + (hi - lo) * uni(rng);
          pos[k] = grid.point(0)[k] + cell * grid.spacing()[k];
        }
      }
      scene.positions.push_back(pos);
      scene.amplitudes.push_back(draw_amplitude(amp_kind, rng));
    }
    if (min_sep <= 0.0) return scene;
    bool ok = true;
    for (int i = 0; ok && i < count; ++i)
      for (int l = i + 1; ok && l < count; ++l)
        if (semi_metric_from_inner(oracle->inner_points(
                scene.positions[i], scene.positions[l])) < min_sep)
          ok = false;
    if (ok) return scene;
  }
  throw HypothesisError("scene: could not satisfy the separation constraint");
}

SourceScene scene_from_config(const json& config, const Grid& grid,
                              std::uint64_t seed, const ColumnOracle* oracle) {
  if (!config.contains("scene")) throw ConfigError("config: missing \"scene\"");
  const json& sc = config.at("scene");
  if (sc.contains("sources")) return io::scene_from_json(sc);
  if (sc.contains("generate"))
    return generate_scene(sc.at("generate"), grid, seed, oracle);
  throw ConfigError("scene: needs \"sources\" or \"generate\"");
}

bool scene_on_grid(const SourceScene& scene, const Grid& grid, double tol) {
  for (const auto& p : scene.positions)
    if ((grid.point(grid.nearest_index(p)) - p).norm() > tol) return false;
  return true;
}

/// Model-consistent data: sum of amp_j * Z(y_j) * alpha(y_j) * column(y_j).
/// For on-grid scenes this equals apply(truth_vector(scene)).
CVector synth_model_data(const SensingMatrix& m, const SourceScene& scene) {
  const double k0 = m.geometry().center_wavenumber();
  CVector d = CVector::Zero(m.rows());
  const bool model = m.model() == ModelKind::paraxial_model;
  for (int j = 0; j < scene.size(); ++j) {
    const Vec3& y = scene.positions[j];
    const CVector col = m.column_for_position(y);
    double alpha;
    if (model) {
      alpha = std::sqrt(double(m.rows())) / (4.0 * M_PI * m.geometry().range());
    } else {
      // norm of the raw (unnormalized) column at y
      CVector raw(m.rows());
      int w = 0;
      for (int l = 0; l < m.geometry().omega_count(); ++l) {
        const double omega = m.geometry().frequencies()[l];
        const double f = m.geometry().pulse(omega);
        for (int r = 0; r < m.geometry().receiver_count(); ++r)
          raw[w++] = f * greens(omega, m.geometry().receiver3(r), y,
                                m.geometry().sound_speed());
      }
      alpha = raw.norm();
    }
    d += scene.amplitudes[j] * std::polar(alpha, k0 * y[2]) * col;
  }
  return d;
}

json geometry_report(const ImagingGeometry& geom) {
  json j;
  j["hash"] = io::hash_hex(geom.hash());
  const RegimeReport regime = check_paraxial_regime(geom);
  json ratios = json::array();
  for (const auto& r : regime.ratios)
    ratios.push_back({{"name", r.name},
                      {"value", r.value},
                      {"wants_small", r.wants_small},
                      {"pass", r.pass}});
  j["regime"] = {{"pass", regime.pass}, {"ratios", ratios}};
  const SamplingReport samp = check_array_sampling(geom);
  j["sampling"] = {{"margin_cross", samp.margin_cross},
                   {"margin_range", samp.margin_range},
                   {"aperture_ok", samp.aperture_ok},
                   {"underdetermined", samp.underdetermined},
                   {"underdetermined_margin", samp.underdetermined_margin}};
  j["grid"] = {{"counts", {geom.grid().counts()[0], geom.grid().counts()[1],
                           geom.grid().counts()[2]}},
               {"N", geom.grid().size()},
               {"M", geom.measurement_count()}};
  return j;
}

RecoveryResult solve_from_config(const json& config, const SensingMatrix& m,
                                 const CVector& d, double noise_abs) {
  SolveSettings settings = settings_from_config(config);
  const std::string method =
      config.contains("solver")
          ? config.at("solver").value("method", "basis_pursuit")
          : "basis_pursuit";
  if (method == "basis_pursuit") return basis_pursuit(m.entries(), d, settings);
  if (method == "l1_penalty") {
    if (settings.gamma <= 0.0 && noise_abs > 0.0) {
      // gamma close to the noise level, scaled by the data correlation
      settings.gamma =
          (noise_abs / std::max(d.norm(), 1e-300)) *
          (m.entries().adjoint() * d).cwiseAbs().maxCoeff();
    }
    return l1_penalty(m.entries(), d, settings);
  }
  if (method == "constrained")
    return constrained_denoise(m.entries(), d, noise_abs, settings);
  throw ConfigError("solver: unknown method \"" + method + "\"");
}

void ensure_out_dir(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

}  // namespace

ExitCode status_to_exit(const json& report) {
  const std::string status = report.value("status", "ok");
  if (status == "ok") return ExitCode::ok;
  if (status == "non_converged") return ExitCode::nonconvergence;
  return ExitCode::hypothesis;
}

json run_recover(const json& config, const RunOptions& opts) {
  const ImagingGeometry geom = geom_from_config(config);
  const SensingMatrix matrix = matrix_from_config(config, geom);
  const bool randomized =
      config.contains("scene") && config.at("scene").contains("generate");
  const std::uint64_t seed = resolve_seed(config, opts, randomized);
  const MatrixColumnOracle oracle(matrix);
  const SourceScene scene =
      scene_from_config(config, geom.grid(), mix_seed(seed, 1), &oracle);

  const double noise_level = config.value("noise_level", 0.0);
  const bool on_grid = scene_on_grid(scene, geom.grid(), 1e-9 * (1.0 + geom.range()));

  CVector d;
  if (matrix.model() == ModelKind::paraxial_model) {
    d = add_relative_noise(synth_model_data(matrix, scene), noise_level,
                           mix_seed(seed, 2));
  } else {
    d = synthesize_data(scene, geom, noise_level, mix_seed(seed, 2));
  }

  const RecoveryResult result =
      solve_from_config(config, matrix, d, noise_level * d.norm());

  json report;
  report["kind"] = "recover";
  report["seed"] = seed;
  report["geometry"] = geometry_report(geom);
  report["scene"] = io::scene_to_json(scene);
  report["noise_level"] = noise_level;
  report["result"] = io::result_to_json(result);
  report["status"] = result.converged ? "ok" : "non_converged";

  if (on_grid) {
    const SparseVector truth = matrix.truth_vector(scene);
    const CVector truth_dense = truth.to_dense(matrix.cols());
    const CVector approx = result.rho_thresholded.to_dense(matrix.cols());
    const double err = recovery_error_inf(approx, truth_dense);
    report["recovery"] = {{"error_inf_rel", err}, {"recovered", err < 0.01}};
  }

  if (!opts.out_dir.empty()) {
    ensure_out_dir(opts.out_dir);
    io::write_amplitude_csv(opts.out_dir + "/amplitudes.csv", result.rho_star,
                            geom.grid());
    io::write_data_csv(opts.out_dir + "/data.csv", d);
  }
  return report;
}

json run_coherence(const json& config, const RunOptions& opts) {
  const ImagingGeometry geom = geom_from_config(config);
  const std::string source = config.value("source", "kernel_paraxial");

  std::vector<int> svals;
  if (config.contains("s")) {
    if (config.at("s").is_array())
      for (const auto& v : config.at("s")) svals.push_back(v.get<int>());
    else
      svals.push_back(config.at("s").get<int>());
  } else {
    svals = {2};
  }
  std::vector<CoherenceVariant> variants;
  for (const auto& v : config.value("variants", std::vector<std::string>{"sum_s_terms"})) {
    if (v == "sum_s_terms") variants.push_back(CoherenceVariant::sum_s_terms);
    else if (v == "sum_s_minus_1_terms") variants.push_back(CoherenceVariant::sum_s_minus_1_terms);
    else throw ConfigError("coherence: unknown variant \"" + v + "\"");
  }

  json report;
  report["kind"] = "coherence";
  report["geometry"] = geometry_report(geom);
  report["source"] = source;
  json reports = json::array();

  std::optional<SensingMatrix> matrix;
  std::optional<GramKernel> kernel;
  if (source == "exact" || source == "paraxial_model") {
    matrix = source == "exact"
                 ? matrix_from_config(config, geom)
                 : assemble_paraxial_model(geom);
  } else if (source == "kernel_paraxial") {
    kernel.emplace(geom, GramKernel::Kind::paraxial);
  } else if (source == "kernel_broadband") {
    kernel.emplace(geom, GramKernel::Kind::broadband);
  } else {
    throw ConfigError("coherence: unknown source \"" + source + "\"");
  }

  for (int s : svals)
    for (auto variant : variants) {
      const CoherenceReport rep = matrix
                                      ? cumulative_coherence(*matrix, s, variant)
                                      : cumulative_coherence(*kernel, s, variant);
      reports.push_back(io::coherence_to_json(rep));
    }
  report["coherence"] = reports;

  if (config.contains("interaction_scene")) {
    const std::uint64_t seed = resolve_seed(config, opts, true);
    std::unique_ptr<ColumnOracle> oracle;
    if (matrix)
      oracle = std::make_unique<MatrixColumnOracle>(*matrix);
    else
      oracle = std::make_unique<KernelColumnOracle>(*kernel);
    const SourceScene scene = [&] {
      const json& sc = config.at("interaction_scene");
      if (sc.contains("sources")) return io::scene_from_json(sc);
      return generate_scene(sc.at("generate"), geom.grid(), mix_seed(seed, 3),
                            oracle.get());
    }();
    const InteractionReport rep =
        interaction_coefficient(scene.positions, *oracle);
    report["interaction"] = io::interaction_to_json(rep);
    if (!opts.out_dir.empty()) {
      ensure_out_dir(opts.out_dir);
      io::write_per_point_csv(opts.out_dir + "/interaction.csv", rep, geom.grid());
    }
  }

  report["status"] = "ok";
  if (!opts.out_dir.empty() && kernel) {
    ensure_out_dir(opts.out_dir);
    io::write_offset_table_csv(opts.out_dir + "/gram_offsets.csv", *kernel);
  }
  return report;
}

json run_solve(const json& config, const RunOptions& opts) {
  if (!config.contains("matrix") || !config.contains("data"))
    throw ConfigError("solve: needs \"matrix\" (base path) and \"data\" (csv)");
  const SensingMatrix matrix = io::load_matrix(config.at("matrix").get<std::string>());
  const CVector d = io::read_data_csv(config.at("data").get<std::string>());
  if (d.size() != matrix.rows())
    throw ConfigError("solve: data length does not match the matrix rows");
  const double noise_abs = config.value("noise_level_abs", 0.0);

  const RecoveryResult result = solve_from_config(config, matrix, d, noise_abs);

  json report;
  report["kind"] = "solve";
  report["geometry"] = geometry_report(matrix.geometry());
  report["result"] = io::result_to_json(result);
  report["status"] = result.converged ? "ok" : "non_converged";
  if (!opts.out_dir.empty()) {
    ensure_out_dir(opts.out_dir);
    io::write_amplitude_csv(opts.out_dir + "/amplitudes.csv", result.rho_star,
                            matrix.grid());
  }
  return report;
}

json run_bounds(const json& config, const RunOptions& opts) {
  (void)opts;
  const ImagingGeometry geom = geom_from_config(config);
  BoundConstants constants;
  if (config.contains("constants")) {
    const json& c = config.at("constants");
    constants.C_single = c.value("C_single", constants.C_single);
    constants.C1 = c.value("C1", constants.C1);
    constants.C2 = c.value("C2", constants.C2);
    constants.C_broadband = c.value("C_broadband", constants.C_broadband);
  }

  json report;
  report["kind"] = "bounds";
  report["geometry"] = geometry_report(geom);

  const ParaxialScales scales = paraxial_scales(geom);
  report["scales"] = {{"H", scales.H},
                      {"H3", scales.H3},
                      {"calH", scales.calH},
                      {"calH3", scales.calH3}};

  auto bounds_json = [](const ResolutionBounds& b) {
    return json{{"h_star", b.h_star}, {"h3_star", b.h3_star}};
  };
  report["base_resolution"] = {
      {"single_freq", bounds_json(base_resolution(geom, Regime::single_freq))}};
  if (geom.bandwidth() > 0.0)
    report["base_resolution"]["broadband"] =
        bounds_json(base_resolution(geom, Regime::broadband));

  json conditions = json::array();
  std::vector<int> svals = {2};
  if (config.contains("s")) {
    svals.clear();
    for (const auto& v : config.at("s")) svals.push_back(v.get<int>());
  }
  for (int s : svals) {
    json entry;
    entry["s"] = s;
    const auto single =
        sparsity_mesh_condition(geom, s, Regime::single_freq, constants);
    entry["single_freq"] = {{"lhs", single.lhs},
                            {"rhs", single.rhs},
                            {"met", single.met},
                            {"margin", single.margin},
                            {"anisotropy_ratio", single.anisotropy_ratio}};
    if (geom.bandwidth() > 0.0) {
      const auto bb = sparsity_mesh_condition(geom, s, Regime::broadband, constants);
      entry["broadband"] = {{"lhs", bb.lhs},
                            {"rhs", bb.rhs},
                            {"met", bb.met},
                            {"margin", bb.margin}};
    }
    entry["coherence_bound"] = paraxial_coherence_bound(
        geom.mesh_h() / scales.H, geom.mesh_h3() / scales.H3, s, constants);
    conditions.push_back(entry);
  }
  report["mesh_conditions"] = conditions;
  report["status"] = "ok";
  return report;
}

namespace {

struct SweepAxis {
  double lo = 0.0, hi = 0.0, tol = 0.01;
  std::array<int, 3> window{};
  int random_pairs = 24;
  double other_mesh_factor = 1.0;
};

SweepAxis sweep_axis_from(const json& j, std::array<int, 3> default_window,
                          double lo, double hi) {
  SweepAxis a;
  a.lo = j.value("lo", lo);
  a.hi = j.value("hi", hi);
  a.tol = j.value("tol", 0.01);
  a.window = default_window;
  if (j.contains("window")) {
    const auto& w = j.at("window");
    a.window = {w[0].get<int>(), w[1].get<int>(), w[2].get<int>()};
  }
  a.random_pairs = j.value("random_pairs", 24);
  a.other_mesh_factor = j.value("other_mesh_factor", 1.0);
  return a;
}

// Recovery check for a fixed two-point scene at one mesh candidate.
struct PairCheck {
  int j = 0, q = 0;
  double error = 0.0;
  bool recovered = false;
  bool converged = true;
};

}  // namespace

json run_resolve_sweep(const json& config, const RunOptions& opts) {
  if (!config.contains("geometry"))
    throw ConfigError("resolve-sweep: missing \"geometry\"");
  const json& jg = config.at("geometry");
  const double a = jg.at("aperture").get<double>();
  const double L = jg.at("range").get<double>();
  const double hA = jg.at("array_spacing").get<double>();
  const std::uint64_t seed = resolve_seed(config, opts, true);

  const double cross_unit = L / a;            // lambda L / a, lambda = 1
  const double range_unit = L * L / (a * a);  // lambda L^2 / a^2
  const double hstar_coeff = 2.0 / M_PI;
  const double h3star_coeff = 16.0 / M_PI;

  SolveSettings settings = settings_from_config(config);
  if (!config.contains("solver")) {
    settings.tol_primal = settings.tol_dual = 1e-7;
    settings.max_iters = 20000;
  }

  auto run_axis = [&](const SweepAxis& axis, bool cross) -> json {
    // Geometry for a candidate coefficient c: the swept mesh step is
    // c * unit; the other axis stays at its base-resolution multiple.
    auto build = [&](double coeff) {
      GeometryConfig gc;
      gc.aperture_a = a;
      gc.range_L = L;
      gc.array_spacing = hA;
      const double h = cross ? coeff * cross_unit
                             : axis.other_mesh_factor * hstar_coeff * cross_unit;
      const double h3 = cross ? axis.other_mesh_factor * h3star_coeff * range_unit
                              : coeff * range_unit;
      gc.mesh_h = h;
      gc.mesh_h3 = h3;
      gc.window_D = axis.window[0] * h;
      gc.window_D3 = axis.window[2] * h3;
      return build_geometry(gc);
    };

    // Pair set fixed across candidates (lattice indices).
    const ImagingGeometry probe = build(axis.hi);
    const Grid& grid = probe.grid();
    const auto& counts = grid.counts();
    std::vector<std::pair<int, int>> pairs;
    const int c1 = counts[0] / 2, c2 = counts[1] / 2, c3 = counts[2] / 2;
    if (cross) {
      if (c1 + 1 < counts[0])
        pairs.emplace_back(grid.index(c1, c2, c3), grid.index(c1 + 1, c2, c3));
      if (c2 + 1 < counts[1])
        pairs.emplace_back(grid.index(c1, c2, c3), grid.index(c1, c2 + 1, c3));
      if (c1 + 1 < counts[0] && c2 + 1 < counts[1])
        pairs.emplace_back(grid.index(c1, c2, c3),
                           grid.index(c1 + 1, c2 + 1, c3));
    } else {
      if (c3 + 1 < counts[2])
        pairs.emplace_back(grid.index(c1, c2, c3), grid.index(c1, c2, c3 + 1));
      if (c3 + 2 < counts[2])
        pairs.emplace_back(grid.index(c1, c2, c3), grid.index(c1, c2, c3 + 2));
    }
    std::mt19937_64 rng(mix_seed(seed, cross ? 11 : 13));
    std::uniform_int_distribution<int> pick(0, grid.size() - 1);
    while (static_cast<int>(pairs.size()) <
           axis.random_pairs + static_cast<int>(cross ? 3 : 2)) {
      const int j = pick(rng), q = pick(rng);
      if (j == q) continue;
      pairs.emplace_back(j, q);
    }

    auto passes = [&](double coeff, json* detail) -> bool {
      const ImagingGeometry geom = build(coeff);
      const SensingMatrix matrix = assemble_paraxial_model(geom);
      std::vector<PairCheck> checks(pairs.size());
      parallel_for(static_cast<int>(pairs.size()), opts.threads, [&](int i) {
        PairCheck& c = checks[i];
        c.j = pairs[i].first;
        c.q = pairs[i].second;
        SparseVector truth;
        truth.support = {c.j, c.q};
        truth.values = {matrix.phase_strip()[c.j] * matrix.column_norms()[c.j],
                        matrix.phase_strip()[c.q] * matrix.column_norms()[c.q]};
        const CVector d = matrix.apply(truth);
        const RecoveryResult res = basis_pursuit(matrix.entries(), d, settings);
        const CVector approx = res.rho_thresholded.to_dense(matrix.cols());
        c.error = recovery_error_inf(approx, truth.to_dense(matrix.cols()));
        c.recovered = c.error < 0.01;
        c.converged = res.converged;
      });
      bool all = true;
      double worst = 0.0;
      for (const auto& c : checks) {
        all = all && c.recovered;
        worst = std::max(worst, c.error);
      }
      if (detail)
        (*detail)
            .push_back({{"coeff", coeff}, {"pass", all}, {"worst_error", worst}});
      return all;
    };

    json candidates = json::array();
    double lo = axis.lo, hi = axis.hi;
    const bool lo_pass = passes(lo, &candidates);
    const bool hi_pass = passes(hi, &candidates);
    json out;
    out["window"] = {axis.window[0], axis.window[1], axis.window[2]};
    out["pairs"] = pairs.size();
    if (lo_pass || !hi_pass) {
      out["status"] = "inconclusive";
      out["lo_pass"] = lo_pass;
      out["hi_pass"] = hi_pass;
      out["candidates"] = candidates;
      return out;
    }
    while (hi - lo > axis.tol) {
      const double mid = 0.5 * (lo + hi);
      if (passes(mid, &candidates))
        hi = mid;
      else
        lo = mid;
    }
    out["status"] = "ok";
    out["estimate_coeff"] = hi;
    out["estimate_interval"] = {lo, hi};
    out["theorem_coeff"] = cross ? hstar_coeff : h3star_coeff;
    out["unit"] = cross ? "lambda L / a" : "lambda L^2 / a^2";
    out["candidates"] = candidates;
    return out;
  };

  json report;
  report["kind"] = "resolve_sweep";
  report["seed"] = seed;
  report["aperture"] = a;
  report["range"] = L;
  if (config.contains("cross"))
    report["cross"] = run_axis(
        sweep_axis_from(config.at("cross"), {10, 10, 3}, 0.30, 0.75), true);
  if (config.contains("range_axis"))
    report["range_axis"] = run_axis(
        sweep_axis_from(config.at("range_axis"), {3, 3, 12}, 1.5, 5.5), false);

  const bool inconclusive =
      (report.contains("cross") && report["cross"]["status"] != "ok") ||
      (report.contains("range_axis") && report["range_axis"]["status"] != "ok");
  report["status"] = inconclusive ? "inconclusive" : "ok";
  if (!opts.out_dir.empty()) {
    ensure_out_dir(opts.out_dir);
    io::write_json_file(opts.out_dir + "/resolve_sweep.json", report);
  }
  return report;
}

namespace {

json outer_bound_json(const OuterMassBound& b) {
  return json{{"lhs", b.lhs},           {"rhs", b.rhs},
              {"interaction", b.interaction}, {"r", b.r},
              {"applicable", b.applicable},   {"holds", b.holds}};
}

// Smallest gamma in a geometric sweep whose penalty minimizer support lies
// inside the union of balls; reports persistence for larger gammas.
json gamma_sweep(const SensingMatrix& matrix, const CVector& d,
                 const std::vector<Vec3>& centers, double r,
                 const ColumnOracle& oracle, const SolveSettings& base,
                 double gamma0_factor, int steps) {
  const double corr_max = (matrix.entries().adjoint() * d).cwiseAbs().maxCoeff();
  const double gamma0 = gamma0_factor * corr_max;

  // D(center_i, z_q) rows for the confinement test.
  const int m = static_cast<int>(centers.size());
  RMatrix dist(m, matrix.cols());
  for (int i = 0; i < m; ++i)
    dist.row(i) =
        (1.0 - oracle.correlate_point(centers[i]).cwiseAbs().array()).transpose();

  json steps_json = json::array();
  double confining_gamma = -1.0;
  bool persistent = true;
  bool confined_nonempty_seen = false;
  for (int t = 0; t < steps; ++t) {
    SolveSettings s = base;
    s.gamma = gamma0 * std::pow(2.0, t);
    const RecoveryResult res = l1_penalty(matrix.entries(), d, s);
    bool confined = true;
    for (int e = 0; e < res.rho_thresholded.size() && confined; ++e) {
      const int q = res.rho_thresholded.support[e];
      bool inside = false;
      for (int i = 0; i < m && !inside; ++i) inside = dist(i, q) < r;
      confined = inside;
    }
    const bool nonempty = res.rho_thresholded.size() > 0;
    steps_json.push_back({{"gamma", s.gamma},
                          {"confined", confined},
                          {"support_size", res.rho_thresholded.size()},
                          {"converged", res.converged}});
    if (confined && nonempty && confining_gamma < 0.0) {
      confining_gamma = s.gamma;
      confined_nonempty_seen = true;
    }
    if (confining_gamma >= 0.0 && !confined) persistent = false;
  }
  return json{{"gamma0", gamma0},
              {"steps", steps_json},
              {"confining_gamma", confining_gamma},
              {"found", confined_nonempty_seen},
              {"persistent", persistent}};
}

}  // namespace

json run_separated(const json& config, const RunOptions& opts) {
  const ImagingGeometry geom = geom_from_config(config);
  const SensingMatrix matrix = matrix_from_config(config, geom);
  const MatrixColumnOracle oracle(matrix);
  const bool randomized =
      config.contains("scene") && config.at("scene").contains("generate");
  const std::uint64_t seed = resolve_seed(config, opts, randomized);
  const SourceScene scene =
      scene_from_config(config, geom.grid(), mix_seed(seed, 21), &oracle);
  const bool on_grid =
      scene_on_grid(scene, geom.grid(), 1e-9 * (1.0 + geom.range()));

  json report;
  report["kind"] = "separated";
  report["seed"] = seed;
  report["geometry"] = geometry_report(geom);
  report["scene"] = io::scene_to_json(scene);
  report["on_grid"] = on_grid;

  const InteractionReport interaction =
      interaction_coefficient(scene.positions, oracle);
  report["interaction"] = io::interaction_to_json(interaction);

  // Ball radius: explicit, or auto above 2 I(Y) and shrunk until disjoint.
  double r = 0.0;
  if (config.contains("r") && config.at("r").is_number()) {
    r = config.at("r").get<double>();
  } else {
    r = std::min(0.45, std::max(2.5 * interaction.value, 0.05));
  }
  bool disjoint = false;
  for (int attempt = 0; attempt < 8 && r > 0.0; ++attempt) {
    std::pair<int, int> clash;
    if (balls_disjoint(scene.positions, r, oracle, &clash)) {
      disjoint = true;
      break;
    }
    if (config.contains("r") && config.at("r").is_number()) break;
    r *= 0.8;
  }
  report["r"] = r;
  if (!disjoint || r <= 2.0 * interaction.value) {
    report["status"] = "hypothesis_failed";
    report["warning"] = !disjoint
                            ? "balls around the sources are not disjoint"
                            : "no radius with 2 I(Y) < r available";
    return report;
  }

  const double noise_level = config.value("noise_level", 0.0);
  CVector d = synth_model_data(matrix, scene);
  d = add_relative_noise(d, noise_level, mix_seed(seed, 22));

  json solver_cfg = config;
  if (!on_grid && (!config.contains("solver") ||
                   config.at("solver").value("method", "") == "")) {
    // Off-grid data is not in the range of the on-grid columns; use the
    // penalty form by default.
    solver_cfg["solver"]["method"] = "l1_penalty";
    if (solver_cfg["solver"].value("gamma", 0.0) <= 0.0)
      solver_cfg["solver"]["gamma"] =
          1e-3 * (matrix.entries().adjoint() * d).cwiseAbs().maxCoeff();
  }
  const RecoveryResult result =
      solve_from_config(solver_cfg, matrix, d, noise_level * d.norm());
  report["result"] = io::result_to_json(result);

  SupportDecomposition decomp;
  try {
    decomp = decompose_support(result, scene.positions, r, oracle);
  } catch (const HypothesisError& e) {
    report["status"] = "hypothesis_failed";
    report["warning"] = e.what();
    return report;
  }
  report["decomposition"] = {{"inner_l1", decomp.inner_l1},
                             {"outer_l1", decomp.outer_l1},
                             {"outer_fraction", decomp.outer_fraction},
                             {"inner_entries", decomp.inner.size()},
                             {"outer_entries", decomp.outer.size()}};
  report["outer_mass_bound"] =
      outer_bound_json(separated_support_bound(decomp, interaction.value));

  if (on_grid) {
    const SparseVector truth = matrix.truth_vector(scene);
    CVector truth_at_centers(scene.size());
    for (int i = 0; i < scene.size(); ++i) truth_at_centers[i] = truth.values[i];
    const EffectiveSource eff =
        effective_source(decomp, scene.positions, oracle, &truth_at_centers);
    report["effective_source"] = {{"error_l1_rel", eff.error_l1_rel}};
    report["effective_error_bound"] = outer_bound_json(
        effective_error_bound(eff, truth_at_centers, interaction.value, r));
  }

  if (config.contains("gamma_sweep") &&
      config.at("gamma_sweep").value("enabled", true)) {
    const json& gs = config.at("gamma_sweep");
    SolveSettings s = settings_from_config(config);
    report["gamma_sweep"] =
        gamma_sweep(matrix, d, scene.positions, r, oracle, s,
                    gs.value("gamma0_factor", 1e-4), gs.value("steps", 16));
  }

  const auto table = ball_mass_table(decomp, scene.positions);
  report["ball_masses"] = io::ball_mass_to_json(table);
  report["status"] = result.converged ? "ok" : "non_converged";
  if (!opts.out_dir.empty()) {
    ensure_out_dir(opts.out_dir);
    io::write_ball_mass_csv(opts.out_dir + "/ball_masses.csv", table);
    io::write_amplitude_csv(opts.out_dir + "/amplitudes.csv", result.rho_star,
                            geom.grid());
  }
  return report;
}

json run_cluster(const json& config, const RunOptions& opts) {
  const ImagingGeometry geom = geom_from_config(config);
  const SensingMatrix matrix = matrix_from_config(config, geom);
  const MatrixColumnOracle oracle(matrix);
  const bool randomized =
      config.contains("scene") && config.at("scene").contains("generate");
  const std::uint64_t seed = resolve_seed(config, opts, randomized);
  const SourceScene scene =
      scene_from_config(config, geom.grid(), mix_seed(seed, 31), &oracle);
  if (!scene_on_grid(scene, geom.grid(), 1e-9 * (1.0 + geom.range())))
    throw ConfigError("cluster: sources must lie on the grid");

  const double epsilon = config.value("epsilon", 0.2);
  const double r = config.value("r", 0.5);
  if (!(epsilon < r && r < 1.0))
    throw ConfigError("cluster: needs epsilon < r < 1");

  json report;
  report["kind"] = "cluster";
  report["seed"] = seed;
  report["geometry"] = geometry_report(geom);
  report["scene"] = io::scene_to_json(scene);
  report["epsilon"] = epsilon;
  report["r"] = r;

  BallCover cover;
  try {
    cover = cluster_cover(scene.positions, epsilon, oracle);
  } catch (const HypothesisError& e) {
    report["status"] = "hypothesis_failed";
    report["warning"] = e.what();
    return report;
  }
  std::vector<Vec3> centers;
  for (int c : cover.center_grid_index) centers.push_back(geom.grid().point(c));
  report["cover"] = {{"centers", cover.center_grid_index},
                     {"count", centers.size()}};

  const InteractionReport interaction_eps =
      interaction_coefficient(centers, oracle);
  report["interaction_eps"] = io::interaction_to_json(interaction_eps);

  const SparseVector truth = matrix.truth_vector(scene);
  const CVector d = matrix.apply(truth);
  const RecoveryResult result =
      solve_from_config(config, matrix, d, 0.0);
  report["result"] = io::result_to_json(result);

  SupportDecomposition decomp;
  try {
    decomp = decompose_support(result, centers, r, oracle);
  } catch (const HypothesisError& e) {
    report["status"] = "hypothesis_failed";
    report["warning"] = e.what();
    return report;
  }
  report["decomposition"] = {{"inner_l1", decomp.inner_l1},
                             {"outer_l1", decomp.outer_l1},
                             {"outer_fraction", decomp.outer_fraction}};

  const EffectiveSource eff = cluster_effective_source(truth, cover, oracle);
  json effs = json::array();
  for (Eigen::Index i = 0; i < eff.values.size(); ++i)
    effs.push_back(std::abs(eff.values[i]));
  report["effective_source_moduli"] = effs;

  const ClusterMassBound bound =
      cluster_support_bound(decomp, eff, truth, interaction_eps.value);
  report["cluster_mass_bound"] = {{"lhs", bound.lhs},
                                  {"rhs", bound.rhs},
                                  {"interaction_eps", bound.interaction_eps},
                                  {"rho_l1", bound.rho_l1},
                                  {"rho_eff_l1", bound.rho_eff_l1},
                                  {"applicable", bound.applicable},
                                  {"holds", bound.holds}};

  const auto table = ball_mass_table(decomp, centers);
  report["ball_masses"] = io::ball_mass_to_json(table);
  report["status"] = result.converged ? "ok" : "non_converged";
  if (!opts.out_dir.empty()) {
    ensure_out_dir(opts.out_dir);
    io::write_ball_mass_csv(opts.out_dir + "/ball_masses.csv", table);
    io::write_amplitude_csv(opts.out_dir + "/amplitudes.csv", result.rho_star,
                            geom.grid());
  }
  return report;
}

json run_validate_paraxial(const json& config, const RunOptions& opts) {
  (void)opts;
  const double tolerance = config.value("tolerance", 0.05);
  const std::uint64_t seed = resolve_seed(config, opts, true);

  json report;
  report["kind"] = "validate_paraxial";
  report["tolerance"] = tolerance;
  bool ok = true;

  if (config.contains("single")) {
    const json& jc = config.at("single");
    const ImagingGeometry geom =
        build_geometry(io::geometry_config_from_json(jc.at("geometry")));
    const SensingMatrix matrix = assemble_exact(geom, SensingMode::single_freq);
    const GramKernel kernel(geom, GramKernel::Kind::paraxial);
    const int n = geom.grid().size();
    const int pair_count = jc.value("pairs", 400);
    std::mt19937_64 rng(mix_seed(seed, 41));
    std::uniform_int_distribution<int> pick(0, n - 1);
    double max_err = 0.0;
    int checked = 0;
    const double floor = jc.value("modulus_floor", 1e-3);
    for (int t = 0; t < pair_count; ++t) {
      const int j = pick(rng), q = pick(rng);
      if (j == q) continue;
      const double exact =
          std::abs(inner(matrix.entries().col(j), matrix.entries().col(q)));
      const double analytic = std::abs(kernel.entry(j, q));
      if (analytic < floor) continue;
      max_err = std::max(max_err, std::abs(exact - analytic) / analytic);
      ++checked;
    }
    const bool pass = max_err <= tolerance && checked > 0;
    report["single"] = {{"geometry", geometry_report(geom)},
                        {"checked_pairs", checked},
                        {"max_rel_modulus_error", max_err},
                        {"pass", pass}};
    ok = ok && pass;
  }

  if (config.contains("broadband")) {
    const json& jc = config.at("broadband");
    const ImagingGeometry geom =
        build_geometry(io::geometry_config_from_json(jc.at("geometry")));
    const int n = geom.grid().size();
    const int pair_count = jc.value("pairs", 150);
    const double floor = jc.value("modulus_floor", 0.01);
    std::mt19937_64 rng(mix_seed(seed, 42));
    std::uniform_int_distribution<int> pick(0, n - 1);
    double max_err = 0.0;
    int checked = 0;
    for (int t = 0; t < pair_count; ++t) {
      const int j = pick(rng), q = pick(rng);
      if (j == q) continue;
      const Vec3 zq = geom.grid().point(j), zl = geom.grid().point(q);
      const double analytic = broadband_gram(geom, zq, zl);
      if (analytic < floor) continue;
      const double discrete = std::abs(broadband_gram_discrete(geom, zq, zl));
      max_err = std::max(max_err, std::abs(discrete - analytic) / analytic);
      ++checked;
    }
    const bool pass = max_err <= tolerance && checked > 0;
    report["broadband"] = {{"geometry", geometry_report(geom)},
                           {"checked_pairs", checked},
                           {"max_rel_modulus_error", max_err},
                           {"pass", pass}};
    ok = ok && pass;
  }

  report["status"] = ok ? "ok" : "validation_failed";
  return report;
}

}  // namespace sparseimg
