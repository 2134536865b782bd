#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "merr/csv.hpp"
#include "merr/errors.hpp"
#include "merr/harness.hpp"
#include "oracles.hpp"

using namespace merr;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 8;
  cfg.steps = 40;
  cfg.spinup_steps = 50;
  cfg.seed = 3;
  cfg.r_variance = 1e-3;
  return cfg;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("merr_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("empty config yields the reference defaults") {
  const ExperimentConfig cfg = parse_config_text("", "test");
  CHECK(cfg.n == 40);
  CHECK(cfg.steps == 3000);
  CHECK(cfg.dt == 0.05);
  CHECK(cfg.r_variance == 1e-8);
  CHECK(cfg.b_variance == 1e12);
  CHECK(cfg.spinup_steps == 1000);
  CHECK_FALSE(cfg.cyclic_cov);
  CHECK(cfg.model_error_scale == 1.0);
  REQUIRE(cfg.epsilons.size() == 3);
  CHECK(cfg.epsilons[0] == 0.1);
  CHECK(cfg.epsilons[2] == 0.001);
}

TEST_CASE("single override keeps the remaining defaults") {
  const ExperimentConfig cfg = parse_config_text("R_variance = 1e-3\n", "test");
  CHECK(cfg.r_variance == 1e-3);
  CHECK(cfg.n == 40);
  CHECK(cfg.b_variance == 1e12);
}

TEST_CASE("comments, blank lines and lists parse") {
  const std::string text =
      "# reference run\n"
      "\n"
      "N = 12\n"
      "epsilons = 0.5, 0.25,0.125\n"
      "cyclic_cov = true\n"
      "output_dir = runs/a\n";
  const ExperimentConfig cfg = parse_config_text(text, "test");
  CHECK(cfg.n == 12);
  REQUIRE(cfg.epsilons.size() == 3);
  CHECK(cfg.epsilons[1] == 0.25);
  CHECK(cfg.cyclic_cov);
  CHECK(cfg.output_dir == "runs/a");
}

TEST_CASE("config violations are rejected with context") {
  CHECK_THROWS_WITH_AS(parse_config_text("N = 2\n", "test"),
                       "config: N >= 5 required", ValidationError);

  try {
    parse_config_text("N = 12\nnot a line\n", "test");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    CHECK(e.line() == 2);
  }

  try {
    parse_config_text("\n\nresolution = 4\n", "test");
    FAIL("expected ConfigParseError");
  } catch (const ConfigParseError& e) {
    CHECK(e.line() == 3);
  }

  CHECK_THROWS_AS(parse_config_text("dt = fast\n", "test"), ConfigParseError);
  CHECK_THROWS_AS(parse_config_text("steps = 0\n", "test"), ValidationError);
}

TEST_CASE("twin experiment satisfies its structural contracts") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult result = run_twin_experiment(cfg);

  REQUIRE(result.truth.size() == 40);
  REQUIRE(result.analysis.size() == 40);
  REQUIRE(result.beta.size() == 39);
  REQUIRE(result.beta_tilde.size() == 39);
  CHECK(result.sampled_moments.sample_count == 39);

  SUBCASE("truth reconstruction recovers the realized errors") {
    const Rk4Flow flow(std::make_shared<Lorenz96>(), cfg.dt);
    for (std::size_t k = 0; k + 1 < result.truth.size(); ++k) {
      const StateVector recomputed = result.truth[k + 1] - flow.apply(result.truth[k]);
      CHECK(max_abs(StateVector(recomputed - result.beta[k])) < 1e-13);
    }
  }

  SUBCASE("hovmoller matrix matches the trajectories") {
    REQUIRE(result.hovmoller.rows() == 40);
    REQUIRE(result.hovmoller.cols() == 8);
    CHECK(result.hovmoller.minCoeff() >= 0.0);
    CHECK(result.hovmoller_max == result.max_analysis_error);
    const double entry = std::abs(result.truth[5][3] - result.analysis[5][3]);
    CHECK(result.hovmoller(5, 3) == entry);
  }

  SUBCASE("certificate inventory: one per epsilon per family plus tight instances") {
    long beta_count = 0, mean_count = 0, cov_count = 0, tight_count = 0;
    for (const BoundCertificate& cert : result.certificates) {
      if (cert.tight) ++tight_count;
      if (cert.theorem == TheoremKind::BetaBound) ++beta_count;
      if (cert.theorem == TheoremKind::MeanBound) ++mean_count;
      if (cert.theorem == TheoremKind::CovEntryBound) ++cov_count;
    }
    CHECK(beta_count == 4);   // 3 epsilons + tight
    CHECK(mean_count == 4);
    CHECK(cov_count == 3);
    CHECK(tight_count == 2);

    for (const BoundCertificate& cert : result.certificates) {
      if (cert.tight) CHECK(cert.passed);
      if (!cert.hypothesis_met) CHECK(cert.passed);  // vacuity honesty
    }
  }

  SUBCASE("empirical L dominates every recorded ingredient") {
    CHECK(result.lipschitz.value >= result.lipschitz.jacobian_sup_truth);
    CHECK(result.lipschitz.value >= result.lipschitz.jacobian_sup_analysis);
    CHECK(result.lipschitz.value >= result.lipschitz.paired_secant_max);
    CHECK(result.lipschitz.value > 0.0);
  }
}

TEST_CASE("same seed reproduces the experiment bitwise") {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_twin_experiment(cfg);
  const ExperimentResult b = run_twin_experiment(cfg);

  for (std::size_t k = 0; k < a.truth.size(); ++k) {
    CHECK(max_abs(StateVector(a.truth[k] - b.truth[k])) == 0.0);
    CHECK(max_abs(StateVector(a.analysis[k] - b.analysis[k])) == 0.0);
  }
  CHECK(max_abs(Matrix(a.estimated_moments.cov - b.estimated_moments.cov)) == 0.0);
  CHECK(a.lipschitz.value == b.lipschitz.value);
}

TEST_CASE("analysis error tracks the observation noise scale") {
  ExperimentConfig cfg = small_config();
  cfg.steps = 300;
  cfg.seed = 5;
  const ExperimentResult result = run_twin_experiment(cfg);
  const double noise_scale = std::sqrt(cfg.r_variance);
  CHECK(result.max_analysis_error < 6.0 * noise_scale);
  CHECK(result.max_analysis_error > noise_scale / 6.0);
}

TEST_CASE("replacing one observation perturbs every later analysis") {
  const Eigen::Index n = 6;
  const auto model = std::make_shared<Lorenz96>();
  const Rk4Flow flow(model, 0.05);

  AssimilationConfig assim;
  assim.background_cov = Matrix::Identity(n, n);
  assim.observation_cov = Matrix::Identity(n, n);
  assim.obs_operator = ObservationOperator::identity(n);

  std::mt19937_64 gen(137);
  Trajectory observations;
  for (int k = 0; k < 30; ++k)
    observations.push_back(StateVector::Constant(n, 8.0) +
                           oracles::random_vector(gen, n, -0.5, 0.5));
  const StateVector first_forecast = observations.front();

  const Trajectory base = run_analysis_chain(observations, first_forecast, flow, assim);

  const std::size_t k0 = 12;
  Trajectory perturbed_obs = observations;
  perturbed_obs[k0][2] += 0.1;
  const Trajectory shifted = run_analysis_chain(perturbed_obs, first_forecast, flow, assim);

  for (std::size_t k = 0; k < k0; ++k)
    CHECK(max_abs(StateVector(base[k] - shifted[k])) == 0.0);
  for (std::size_t k = k0; k < base.size(); ++k)
    CHECK(max_abs(StateVector(base[k] - shifted[k])) > 0.0);
}

TEST_CASE("disabling model error leaves only analysis noise in the residuals") {
  ExperimentConfig cfg;
  cfg.n = 40;
  cfg.steps = 500;
  cfg.spinup_steps = 200;
  cfg.seed = 9;
  cfg.r_variance = 1e-8;
  cfg.model_error_scale = 0.0;

  const ExperimentResult result = run_twin_experiment(cfg);
  CHECK(max_abs(result.prescribed_mean) == 0.0);
  CHECK(max_abs(result.prescribed_cov) == 0.0);
  for (const StateVector& b : result.beta) CHECK(max_abs(b) == 0.0);

  double beta_tilde_max = 0.0;
  for (const StateVector& b : result.beta_tilde)
    beta_tilde_max = std::max(beta_tilde_max, max_abs(b));
  CHECK(beta_tilde_max < 1e-3);
  CHECK(max_abs(result.estimated_moments.mean) < 1e-4);
  CHECK(max_abs(result.estimated_moments.cov) < 1e-6);
}

TEST_CASE("outputs round-trip, hash cleanly and rebuild the reported moments") {
  TempDir dir("outputs");
  const ExperimentConfig cfg = small_config();
  const ExperimentResult result = run_twin_experiment(cfg);
  const OutputManifest manifest = write_outputs(result, dir.path);

  SUBCASE("written Q~ reads back exactly") {
    const Matrix q = read_csv(dir.path / "Q_estimated.csv");
    REQUIRE(q.rows() == cfg.n);
    CHECK(max_abs(Matrix(q - result.estimated_moments.cov)) == 0.0);
  }

  SUBCASE("manifest hashes match recomputation") {
    REQUIRE(manifest.entries.size() == 13);
    for (const OutputManifest::Entry& e : manifest.entries) {
      CHECK(to_hex(fnv1a64_file(dir.path / e.name)) == e.fnv1a64);
      CHECK(std::filesystem::file_size(dir.path / e.name) == e.bytes);
    }
  }

  SUBCASE("saved sequences rebuild the moment error report") {
    const Matrix beta = read_csv(dir.path / "beta.csv");
    const Matrix beta_tilde = read_csv(dir.path / "beta_tilde.csv");
    ErrorSequence seq, seq_tilde;
    for (Eigen::Index r = 0; r < beta.rows(); ++r) {
      seq.push_back(beta.row(r));
      seq_tilde.push_back(beta_tilde.row(r));
    }
    const MomentEstimate sampled = estimate_moments(seq);
    const MomentEstimate estimated = estimate_moments(seq_tilde);
    const MomentErrorReport rebuilt = moment_error_report(
        sampled, estimated, result.prescribed_mean, result.prescribed_cov);
    CHECK(rebuilt.max_cov_sampled_vs_estimated ==
          doctest::Approx(result.report.max_cov_sampled_vs_estimated).epsilon(1e-15));
    CHECK(rebuilt.max_mean_sampled_vs_estimated ==
          doctest::Approx(result.report.max_mean_sampled_vs_estimated).epsilon(1e-15));
  }

  SUBCASE("a rerun with the same seed produces byte-identical files") {
    TempDir dir2("outputs_rerun");
    write_outputs(run_twin_experiment(cfg), dir2.path);
    for (const OutputManifest::Entry& e : manifest.entries)
      CHECK(slurp(dir.path / e.name) == slurp(dir2.path / e.name));
  }

  SUBCASE("compare emits finite ratios for a run against itself") {
    const std::string cmp = compare_runs(dir.path, dir.path);
    CHECK(cmp.find("\"rms\": 1.0") != std::string::npos);
  }
}

TEST_CASE("an unstable timestep surfaces as an integration failure") {
  ExperimentConfig cfg = small_config();
  cfg.dt = 5.0;
  CHECK_THROWS_AS(run_twin_experiment(cfg), IntegrationFailure);
}

TEST_CASE("unwritable output directory raises an I/O error") {
  const ExperimentConfig cfg = small_config();
  ExperimentResult result = run_twin_experiment(cfg);
  CHECK_THROWS_AS(write_outputs(result, "/proc/definitely/not/writable"), IoError);
}

}  // TEST_SUITE
