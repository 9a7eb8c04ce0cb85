#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sparseimg/io.hpp"

namespace sparseimg {

/// CLI exit codes: 0 ok, 2 config error, 3 hypothesis/infeasibility,
/// 4 non-convergence. Runners record failures in the report's "status"
/// field; main() maps that to the process exit code.
enum class ExitCode : int { ok = 0, config_error = 2, hypothesis = 3, nonconvergence = 4 };

ExitCode status_to_exit(const io::json& report);

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the config seed
  std::string out_dir;                // empty: no files written
  int threads = 1;
};

/// Synthesize -> solve -> threshold -> compare to truth (when on-grid).
io::json run_recover(const io::json& config, const RunOptions& opts);

/// Cumulative coherence over matrices or analytic kernels; optional
/// interaction coefficient of a scene.
io::json run_coherence(const io::json& config, const RunOptions& opts);

/// Solve from an exported matrix and a data CSV.
io::json run_solve(const io::json& config, const RunOptions& opts);

/// Base resolutions, sparsity mesh conditions and the coherence bound.
io::json run_bounds(const io::json& config, const RunOptions& opts);

/// Bisection for the smallest mesh with < 1% recovery error on two-source
/// scenes offset in cross-range (for h) and in range (for h3).
io::json run_resolve_sweep(const io::json& config, const RunOptions& opts);

/// Fine-grid pipeline for well separated sources: solve, decompose,
/// effective source, outer-mass and error bounds, optional gamma sweep.
io::json run_separated(const io::json& config, const RunOptions& opts);

/// Fine-grid pipeline for clustered sources: cover, solve, decompose,
/// cluster bound, per-ball masses.
io::json run_cluster(const io::json& config, const RunOptions& opts);

/// Exact discrete Gram vs analytic paraxial kernel, and discrete broadband
/// sum vs the broadband kernel, with relative modulus error thresholds.
io::json run_validate_paraxial(const io::json& config, const RunOptions& opts);

}  // namespace sparseimg
