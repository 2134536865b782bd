#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "merr/assimilation.hpp"
#include "merr/bounds.hpp"
#include "merr/dynamics.hpp"
#include "merr/estimation.hpp"
#include "merr/types.hpp"

namespace merr {

/// Twin-experiment settings. Defaults reproduce the reference configuration:
/// 40 variables, 3000 states, dt = 0.05, B = 1e12 I, R = 1e-8 I, 1000
/// spin-up steps.
struct ExperimentConfig {
  Eigen::Index n = 40;
  long steps = 3000;  // trajectory states tau; yields tau-1 error samples
  double dt = 0.05;
  std::uint64_t seed = 1;
  double r_variance = 1e-8;
  double b_variance = 1e12;
  long spinup_steps = 1000;
  bool cyclic_cov = false;
  /// Multiplies the prescribed error mean and covariance square root;
  /// 0 disables model error entirely.
  double model_error_scale = 1.0;
  std::string output_dir = "out";
  std::vector<double> epsilons = {1e-1, 1e-2, 1e-3};

  void validate() const;
};

/// Empirical Lipschitz constant used by the certificates: the max of the
/// flow-Jacobian infinity norm over the truth and analysis states and of the
/// secant ratios between paired truth/analysis states. A trajectory-local
/// estimate, i.e. a lower bound on any global constant.
struct EmpiricalLipschitz {
  double value = 0.0;
  double jacobian_sup_truth = 0.0;
  double jacobian_sup_analysis = 0.0;
  double paired_secant_max = 0.0;
  long states_visited = 0;
};

/// Counter positions of the three RNG substreams after the run; echoed into
/// summary.json so any draw can be replayed.
struct StreamCounters {
  std::uint64_t model_error = 0;
  std::uint64_t observation_noise = 0;
  std::uint64_t init = 0;
};

struct ExperimentResult {
  ExperimentConfig config;

  Trajectory truth;     // x_t^0..x_t^{tau-1}
  Trajectory analysis;  // x_a^0..x_a^{tau-1}
  ErrorSequence beta;        // realized model errors, tau-1 samples
  ErrorSequence beta_tilde;  // residual estimates, tau-1 samples

  StateVector prescribed_mean;  // mu_bar (after model_error_scale)
  Matrix prescribed_cov;        // Q_bar (after model_error_scale)

  MomentEstimate sampled_moments;    // (mu, Q) from beta
  MomentEstimate estimated_moments;  // (mu~, Q~) from beta~

  MomentErrorReport report;
  EmpiricalLipschitz lipschitz;
  std::vector<BoundCertificate> certificates;

  Matrix hovmoller;  // steps x n matrix of |x_t - x_a| entries
  StreamCounters counters;

  double hovmoller_max = 0.0;
  double analysis_rms = 0.0;      // RMS over all (k, i) of |x_t - x_a|
  double max_analysis_error = 0.0;  // max_k |x_t^k - x_a^k|_inf
};

/// Line-oriented `key = value` file; blank lines and '#' comments are
/// skipped, unknown keys are rejected, absent keys keep their defaults.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

/// Sequential 3DVar chain: the first analysis assimilates y^0 against the
/// supplied first forecast; every later analysis assimilates y^k against
/// f(x_a^{k-1}).
Trajectory run_analysis_chain(const Trajectory& observations,
                              const StateVector& first_forecast, const FlowMap& model,
                              const AssimilationConfig& cfg);

/// Full twin experiment: spin-up, stochastic truth, observations, sequential
/// 3DVar, residual moments, error report, certificates. Deterministic given
/// the seed.
ExperimentResult run_twin_experiment(const ExperimentConfig& cfg);

struct OutputManifest {
  struct Entry {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv1a64;
  };
  std::vector<Entry> entries;
};

/// Writes the CSV diagnostics, summary.json and manifest.json into dir.
OutputManifest write_outputs(const ExperimentResult& result,
                             const std::filesystem::path& dir);

/// Reads two runs' summary.json and returns a JSON ratio summary (a over b)
/// of their analysis errors and moment errors.
std::string compare_runs(const std::filesystem::path& dir_a,
                         const std::filesystem::path& dir_b);

}  // namespace merr
