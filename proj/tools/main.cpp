#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "sparseimg/experiments.hpp"

namespace {

using sparseimg::ExitCode;
using sparseimg::RunOptions;
using json = sparseimg::io::json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config (JSON)")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory for report files");
  cmd->add_option("--seed", args.seed, "Seed override for randomized scenes")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--threads", args.threads, "Worker threads for trials")
      ->check(CLI::PositiveNumber);
}

int dispatch(const std::string& kind, const CommonArgs& args,
             json (*runner)(const json&, const RunOptions&)) {
  try {
    const json config = sparseimg::io::read_json_file(args.config_path);
    if (config.contains("kind") &&
        config.at("kind").get<std::string>() != kind) {
      std::cerr << "config error: config kind '"
                << config.at("kind").get<std::string>()
                << "' does not match subcommand '" << kind << "'\n";
      return static_cast<int>(ExitCode::config_error);
    }
    RunOptions opts;
    if (args.seed_set) opts.seed = args.seed;
    opts.out_dir = args.out_dir;
    opts.threads = args.threads;
    const json report = runner(config, opts);
    if (!args.out_dir.empty())
      sparseimg::io::write_json_file(args.out_dir + "/report.json", report);
    std::cout << report.dump(2) << "\n";
    return static_cast<int>(sparseimg::status_to_exit(report));
  } catch (const sparseimg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  } catch (const sparseimg::HypothesisError& e) {
    std::cerr << "hypothesis error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::hypothesis);
  } catch (const sparseimg::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return static_cast<int>(ExitCode::hypothesis);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::config_error);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse array imaging with l1 optimization"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    json (*runner)(const json&, const RunOptions&);
  };
  const Sub subs[] = {
      {"recover", "Synthesize data, solve, and compare to the truth",
       sparseimg::run_recover},
      {"coherence", "Cumulative coherence and interaction coefficients",
       sparseimg::run_coherence},
      {"solve", "Solve from an exported matrix and data CSV",
       sparseimg::run_solve},
      {"bounds", "Resolution thresholds and coherence bounds",
       sparseimg::run_bounds},
      {"resolve-sweep", "Empirical resolution thresholds by bisection",
       sparseimg::run_resolve_sweep},
      {"separated", "Fine-grid analysis for well separated sources",
       sparseimg::run_separated},
      {"cluster", "Fine-grid analysis for clustered sources",
       sparseimg::run_cluster},
      {"validate-paraxial", "Exact vs analytic kernel validation",
       sparseimg::run_validate_paraxial},
  };

  std::vector<std::pair<CommonArgs, const Sub*>> cmds;
  cmds.reserve(std::size(subs));
  for (const auto& sub : subs) {
    cmds.emplace_back(CommonArgs{}, &sub);
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    add_common(cmd, cmds.back().first);
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [args, sub] : cmds)
    if (app.get_subcommand(sub->name)->parsed())
      return dispatch(sub->name, args, sub->runner);
  return static_cast<int>(ExitCode::config_error);
}
