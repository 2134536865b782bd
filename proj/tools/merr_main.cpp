// merr: twin-experiment driver for model-error moment estimation.
//
// Subcommands:
//   run      run one experiment from a config file and write its diagnostics
//   compare  ratio summary of two finished runs
//
// Exit codes: 0 success, 1 I/O failure, 2 config error, 3 numerical failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "merr/errors.hpp"
#include "merr/harness.hpp"

namespace {

int run_command(const std::string& config_path, bool seed_set, std::uint64_t seed,
                const std::string& out_dir, bool cyclic_cov) {
  merr::ExperimentConfig cfg;
  try {
    cfg = merr::parse_config(config_path);
    if (seed_set) cfg.seed = seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cyclic_cov) cfg.cyclic_cov = true;
  } catch (const merr::IoError& e) {
    // An unreadable config file is a configuration problem, not a runtime
    // I/O failure.
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const merr::ExperimentResult result = merr::run_twin_experiment(cfg);
  const merr::OutputManifest manifest = merr::write_outputs(result, cfg.output_dir);

  long passed = 0, vacuous = 0;
  for (const merr::BoundCertificate& cert : result.certificates) {
    if (cert.vacuous) ++vacuous;
    else if (cert.passed) ++passed;
  }

  std::cout << "run complete: N=" << cfg.n << " steps=" << cfg.steps
            << " seed=" << cfg.seed << "\n"
            << "  analysis error: rms=" << result.analysis_rms
            << " max=" << result.max_analysis_error << "\n"
            << "  empirical L=" << result.lipschitz.value << "\n"
            << "  certificates: " << result.certificates.size() << " total, "
            << passed << " passed, " << vacuous << " vacuous\n"
            << "  wrote " << manifest.entries.size() + 1 << " files to "
            << cfg.output_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"model-error moment estimation twin experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool cyclic_cov = false;

  CLI::App* run = app.add_subcommand("run", "run one twin experiment");
  run->add_option("--config", config_path, "config file (key = value lines)")
      ->required();
  run->add_option("--seed", seed, "override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  run->add_option("--out", out_dir, "override the output directory");
  run->add_flag("--cyclic-cov", cyclic_cov,
                "wrap the band distance of the prescribed covariance");

  std::string dir_a, dir_b;
  CLI::App* compare = app.add_subcommand("compare", "ratio summary of two runs (a over b)");
  compare->add_option("--a", dir_a, "first run directory")->required();
  compare->add_option("--b", dir_b, "second run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return run_command(config_path, seed_set, seed, out_dir, cyclic_cov);
    std::cout << merr::compare_runs(dir_a, dir_b);
    return 0;
  } catch (const merr::ConfigParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const merr::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const merr::IntegrationFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const merr::NotPsdError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const merr::IllPosedAnalysisError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const merr::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
