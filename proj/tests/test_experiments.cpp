#include <doctest.h>

#include "sparseimg/experiments.hpp"

using namespace sparseimg;
using io::json;

namespace {

json coarse_geometry() {
  return json{{"unit", "lambda0"}, {"aperture", 25.0},   {"range", 1000.0},
              {"window_d", 160.0}, {"window_d3", 300.0}, {"mesh_h", 40.0},
              {"mesh_h3", 300.0},  {"array_spacing", 2.5}};
}

json fine_geometry(int n2, int n3) {
  const double h = (2.0 / M_PI) * 40.0 / 4.0;
  const double h3 = (16.0 / M_PI) * 1600.0 / 4.0;
  return json{{"unit", "lambda0"},      {"aperture", 25.0},
              {"range", 1000.0},        {"window_d", h},
              {"window_d2", n2 * h},    {"window_d3", n3 * h3},
              {"mesh_h", h},            {"mesh_h3", h3},
              {"array_spacing", 2.5}};
}

}  // namespace

TEST_CASE("recover: explicit on-grid scene with the exact model") {
  json config;
  config["geometry"] = coarse_geometry();
  config["scene"] = {
      {"sources",
       {{{"position", {-60.0, 20.0, 1000.0}}, {"amplitude", {1.0, 0.0}}},
        {{"position", {60.0, -60.0, 1000.0}}, {"amplitude", {0.0, -1.0}}}}}};
  const json report = run_recover(config, {});
  CHECK(report["status"] == "ok");
  REQUIRE(report.contains("recovery"));
  CHECK(report["recovery"]["recovered"] == true);
  CHECK(status_to_exit(report) == ExitCode::ok);
}

TEST_CASE("recover: noisy constrained solve stays within the noise ball") {
  json config;
  config["geometry"] = coarse_geometry();
  config["noise_level"] = 0.05;
  config["seed"] = 11;
  config["scene"] = {{"generate", {{"count", 2}, {"on_grid", true}}}};
  config["solver"] = {{"method", "constrained"}};
  const json report = run_recover(config, {});
  CHECK(report["status"] == "ok");
}

TEST_CASE("recover: randomized scene requires a seed") {
  json config;
  config["geometry"] = coarse_geometry();
  config["scene"] = {{"generate", {{"count", 2}}}};
  CHECK_THROWS_AS(run_recover(config, {}), ConfigError);
  RunOptions opts;
  opts.seed = 3;
  CHECK(run_recover(config, opts)["status"] == "ok");
}

TEST_CASE("recover: config errors") {
  CHECK_THROWS_AS(run_recover(json::object(), {}), ConfigError);
  json config;
  config["geometry"] = coarse_geometry();
  config["scene"] = {{"sources", json::array()}};
  config["model"] = "bogus";
  CHECK_THROWS_AS(run_recover(config, {}), ConfigError);
}

TEST_CASE("coherence runner reports mu for kernels and matrices") {
  json config;
  config["geometry"] = coarse_geometry();
  config["source"] = "kernel_paraxial";
  config["s"] = {2, 3};
  config["variants"] = {"sum_s_terms", "sum_s_minus_1_terms"};
  const json report = run_coherence(config, {});
  CHECK(report["coherence"].size() == 4);
  for (const auto& entry : report["coherence"])
    CHECK(entry["mu"].get<double>() >= 0.0);

  config["source"] = "exact";
  const json report2 = run_coherence(config, {});
  CHECK(report2["coherence"].size() == 4);
}

TEST_CASE("bounds runner emits base resolutions and mesh conditions") {
  json config;
  config["geometry"] = coarse_geometry();
  config["s"] = {2, 8};
  const json report = run_bounds(config, {});
  CHECK(report["base_resolution"]["single_freq"]["h_star"].get<double>() ==
        doctest::Approx((2.0 / M_PI) * 40.0));
  CHECK(report["mesh_conditions"].size() == 2);
  CHECK(report["status"] == "ok");
}

TEST_CASE("separated runner: on-grid pipeline with bounds") {
  json config;
  config["geometry"] = fine_geometry(25, 13);
  config["model"] = "paraxial";
  const double h = (2.0 / M_PI) * 40.0 / 4.0;
  const double h3 = (16.0 / M_PI) * 1600.0 / 4.0;
  auto pos = [&](int i2, int i3) {
    return json::array({0.0, (i2 - 12) * h, 1000.0 + (i3 - 6) * h3});
  };
  config["scene"] = {
      {"sources",
       {{{"position", pos(1, 1)}, {"amplitude", {1.0, 0.0}}},
        {{"position", pos(23, 11)}, {"amplitude", {1.0, 0.0}}}}}};
  config["gamma_sweep"] = {{"enabled", false}};
  const json report = run_separated(config, {});
  INFO(report.dump(2));
  CHECK(report["status"] == "ok");
  CHECK(report["outer_mass_bound"]["applicable"] == true);
  CHECK(report["outer_mass_bound"]["holds"] == true);
  CHECK(report["effective_error_bound"]["holds"] == true);
}

TEST_CASE("cluster runner: cover, bound and ball masses") {
  json config;
  config["geometry"] = fine_geometry(25, 13);
  config["model"] = "paraxial";
  const double h = (2.0 / M_PI) * 40.0 / 4.0;
  const double h3 = (16.0 / M_PI) * 1600.0 / 4.0;
  // window centers: z2 = (i2 - 12) h, z3 = 1000 + (i3 - 6) h3
  auto pos = [&](int i2, int i3) {
    return json::array({0.0, (i2 - 12) * h, 1000.0 + (i3 - 6) * h3});
  };
  config["scene"] = {
      {"sources",
       {{{"position", pos(2, 2)}, {"amplitude", {1.0, 0.0}}},
        {{"position", pos(21, 10)}, {"amplitude", {1.0, 0.0}}},
        {{"position", pos(22, 10)}, {"amplitude", {1.0, 0.0}}}}}};
  config["epsilon"] = 0.3;
  config["r"] = 0.5;
  const json report = run_cluster(config, {});
  INFO(report.dump(2));
  CHECK(report["status"] == "ok");
  CHECK(report["cover"]["count"] == 2);
  CHECK(report["cluster_mass_bound"]["applicable"] == true);
  CHECK(report["cluster_mass_bound"]["holds"] == true);
}

TEST_CASE("resolve sweep smoke run on a small window") {
  json config;
  config["geometry"] = {{"aperture", 25.0}, {"range", 1000.0}, {"array_spacing", 2.5}};
  config["seed"] = 5;
  config["cross"] = {{"lo", 0.30}, {"hi", 0.75},          {"tol", 0.05},
                     {"window", {6, 6, 1}}, {"random_pairs", 2}};
  RunOptions opts;
  opts.threads = 2;
  const json report = run_resolve_sweep(config, opts);
  INFO(report.dump(2));
  REQUIRE(report.contains("cross"));
  CHECK(report["cross"]["status"] == "ok");
  const double est = report["cross"]["estimate_coeff"].get<double>();
  CHECK(est > 0.30);
  CHECK(est < 0.75);
}

TEST_CASE("exit code mapping") {
  CHECK(status_to_exit(json{{"status", "ok"}}) == ExitCode::ok);
  CHECK(status_to_exit(json{{"status", "non_converged"}}) == ExitCode::nonconvergence);
  CHECK(status_to_exit(json{{"status", "hypothesis_failed"}}) == ExitCode::hypothesis);
  CHECK(status_to_exit(json{{"status", "inconclusive"}}) == ExitCode::hypothesis);
}
