#include "merr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>

#include "merr/csv.hpp"
#include "merr/errors.hpp"

namespace merr {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key, long line) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigParseError("invalid number for '" + key + "': '" + value + "'", line);
  }
  if (pos != value.size())
    throw ConfigParseError("trailing characters after number for '" + key + "'", line);
  return out;
}

long parse_long(const std::string& value, const std::string& key, long line) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(value, &pos);
  } catch (const std::exception&) {
    throw ConfigParseError("invalid integer for '" + key + "': '" + value + "'", line);
  }
  if (pos != value.size())
    throw ConfigParseError("trailing characters after integer for '" + key + "'", line);
  return out;
}

std::uint64_t parse_u64(const std::string& value, const std::string& key, long line) {
  std::size_t pos = 0;
  unsigned long long out = 0;
  try {
    out = std::stoull(value, &pos);
  } catch (const std::exception&) {
    throw ConfigParseError("invalid unsigned integer for '" + key + "': '" + value + "'",
                           line);
  }
  if (pos != value.size())
    throw ConfigParseError("trailing characters after integer for '" + key + "'", line);
  return out;
}

bool parse_bool(const std::string& value, const std::string& key, long line) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigParseError("invalid boolean for '" + key + "': '" + value + "'", line);
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key,
                                      long line) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw ConfigParseError("empty entry in list for '" + key + "'", line);
    out.push_back(parse_double(item, key, line));
  }
  if (out.empty()) throw ConfigParseError("empty list for '" + key + "'", line);
  return out;
}

Matrix sequence_as_matrix(const ErrorSequence& seq) {
  if (seq.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(seq.size()), seq.front().size());
  for (std::size_t k = 0; k < seq.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = seq[k];
  return m;
}

ordered_json certificate_json(const BoundCertificate& cert) {
  ordered_json j;
  j["theorem"] = theorem_name(cert.theorem);
  j["epsilon"] = cert.epsilon;
  j["tight"] = cert.tight;
  j["hypothesis_met"] = cert.hypothesis_met;
  j["vacuous"] = cert.vacuous;
  j["measured_lhs"] = cert.measured_lhs;
  j["bound_rhs"] = cert.bound_rhs;
  j["passed"] = cert.passed;
  j["lipschitz"] = cert.lipschitz;
  j["hypothesis_lhs"] = cert.hypothesis_lhs;
  j["hypothesis_rhs"] = cert.hypothesis_rhs;
  j["tight_epsilon"] = cert.tight_epsilon;
  j["worst_sample"] = cert.worst_sample;
  if (cert.entry_i >= 0) {
    j["entry_i"] = cert.entry_i;
    j["entry_j"] = cert.entry_j;
  }
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n < 5) throw ValidationError("config: N >= 5 required");
  if (steps < 3) throw ValidationError("config: steps >= 3 required");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("config: dt must be > 0");
  if (!(r_variance > 0.0)) throw ValidationError("config: R_variance must be > 0");
  if (!(b_variance > 0.0)) throw ValidationError("config: B_variance must be > 0");
  if (spinup_steps < 0) throw ValidationError("config: spinup_steps must be >= 0");
  if (!(model_error_scale >= 0.0))
    throw ValidationError("config: model_error_scale must be >= 0");
  for (double eps : epsilons) {
    if (!(eps > 0.0)) throw ValidationError("config: epsilons must be > 0");
  }
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string raw;
  long line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigParseError("expected 'key = value' in " + origin, line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigParseError("missing key in " + origin, line_no);
    if (value.empty())
      throw ConfigParseError("missing value for '" + key + "' in " + origin, line_no);

    if (key == "N") {
      cfg.n = static_cast<Eigen::Index>(parse_long(value, key, line_no));
    } else if (key == "steps") {
      cfg.steps = parse_long(value, key, line_no);
    } else if (key == "dt") {
      cfg.dt = parse_double(value, key, line_no);
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, key, line_no);
    } else if (key == "R_variance") {
      cfg.r_variance = parse_double(value, key, line_no);
    } else if (key == "B_variance") {
      cfg.b_variance = parse_double(value, key, line_no);
    } else if (key == "spinup_steps") {
      cfg.spinup_steps = parse_long(value, key, line_no);
    } else if (key == "cyclic_cov") {
      cfg.cyclic_cov = parse_bool(value, key, line_no);
    } else if (key == "model_error_scale") {
      cfg.model_error_scale = parse_double(value, key, line_no);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "epsilons") {
      cfg.epsilons = parse_double_list(value, key, line_no);
    } else {
      throw ConfigParseError("unknown key '" + key + "' in " + origin, line_no);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.string());
}

Trajectory run_analysis_chain(const Trajectory& observations,
                              const StateVector& first_forecast, const FlowMap& model,
                              const AssimilationConfig& cfg) {
  if (observations.empty()) throw ValidationError("run_analysis_chain: no observations");

  Trajectory analysis;
  analysis.reserve(observations.size());
  StateVector forecast = first_forecast;
  for (std::size_t k = 0; k < observations.size(); ++k) {
    if (k > 0) {
      forecast = model.apply(analysis.back());
      if (!all_finite(forecast))
        throw IntegrationFailure("analysis forecast blow-up", static_cast<long>(k));
    }
    analysis.push_back(threedvar_analysis(forecast, observations[k], cfg));
  }
  return analysis;
}

ExperimentResult run_twin_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  ExperimentResult result;
  result.config = cfg;

  const auto model = std::make_shared<Lorenz96>();
  const Rk4Flow flow(model, cfg.dt);

  // Truth initial condition: equilibrium nudged on the first component,
  // transient discarded.
  StateVector state = model->equilibrium(cfg.n);
  state[0] += 0.01;
  for (long k = 0; k < cfg.spinup_steps; ++k) {
    state = flow.apply(state);
    if (!all_finite(state)) throw IntegrationFailure("spin-up blow-up", k);
  }

  const double scale = cfg.model_error_scale;
  result.prescribed_mean = scale * build_true_mean(cfg.n);
  result.prescribed_cov = scale * scale * build_true_cov(cfg.n, cfg.cyclic_cov);
  const GaussianSpec model_error =
      GaussianSpec::from_moments(result.prescribed_mean, result.prescribed_cov);

  RngStream rng_model(cfg.seed, RngUse::ModelError);
  RngStream rng_obs(cfg.seed, RngUse::ObservationNoise);
  RngStream rng_init(cfg.seed, RngUse::Init);

  // Truth: x_t^{k+1} = f(x_t^k) + beta^k.
  result.truth.reserve(static_cast<std::size_t>(cfg.steps));
  result.beta.reserve(static_cast<std::size_t>(cfg.steps - 1));
  result.truth.push_back(state);
  for (long k = 0; k + 1 < cfg.steps; ++k) {
    const StateVector beta = sample_gaussian(model_error, rng_model);
    StateVector next = flow.apply(result.truth.back()) + beta;
    if (!all_finite(next)) throw IntegrationFailure("truth blow-up", k);
    result.beta.push_back(beta);
    result.truth.push_back(std::move(next));
  }

  // Observations of every state.
  const ObservationOperator h = ObservationOperator::identity(cfg.n);
  const Matrix r_sqrt =
      std::sqrt(cfg.r_variance) * Matrix::Identity(cfg.n, cfg.n);
  Trajectory observations;
  observations.reserve(result.truth.size());
  for (const StateVector& x : result.truth)
    observations.push_back(observe(x, h, r_sqrt, rng_obs));

  AssimilationConfig assim;
  assim.background_cov = cfg.b_variance * Matrix::Identity(cfg.n, cfg.n);
  assim.observation_cov = cfg.r_variance * Matrix::Identity(cfg.n, cfg.n);
  assim.obs_operator = h;

  // The first forecast is the spin-up truth perturbed by a unit normal;
  // with the uninformative background this choice is immaterial.
  const StateVector first_forecast = result.truth.front() + rng_init.normal_vector(cfg.n);
  result.analysis = run_analysis_chain(observations, first_forecast, flow, assim);

  result.beta_tilde = residual_sequence(result.analysis, flow);
  result.sampled_moments = estimate_moments(result.beta);
  result.estimated_moments = estimate_moments(result.beta_tilde);
  result.report = moment_error_report(result.sampled_moments, result.estimated_moments,
                                      result.prescribed_mean, result.prescribed_cov);

  result.lipschitz.jacobian_sup_truth =
      estimate_lipschitz(result.truth, flow, LipschitzMethod::JacobianSupremum).value;
  result.lipschitz.jacobian_sup_analysis =
      estimate_lipschitz(result.analysis, flow, LipschitzMethod::JacobianSupremum).value;
  result.lipschitz.paired_secant_max =
      max_secant_ratio(result.truth, result.analysis, flow);
  result.lipschitz.value =
      std::max({result.lipschitz.jacobian_sup_truth,
                result.lipschitz.jacobian_sup_analysis,
                result.lipschitz.paired_secant_max});
  result.lipschitz.states_visited = 2 * cfg.steps;

  result.hovmoller.resize(cfg.steps, cfg.n);
  double sum_sq = 0.0;
  for (long k = 0; k < cfg.steps; ++k) {
    const StateVector err = (result.truth[static_cast<std::size_t>(k)] -
                             result.analysis[static_cast<std::size_t>(k)])
                                .cwiseAbs();
    result.hovmoller.row(k) = err;
    sum_sq += err.squaredNorm();
    result.max_analysis_error = std::max(result.max_analysis_error, max_abs(err));
  }
  result.hovmoller_max = result.max_analysis_error;
  result.analysis_rms =
      std::sqrt(sum_sq / static_cast<double>(cfg.steps * cfg.n));

  // Certificates: one per configured epsilon per theorem family, plus the
  // tight-eps* instances for the per-step and mean bounds. The covariance
  // certificate reports one representative entry.
  const double l = result.lipschitz.value;
  const Eigen::Index cert_entry = std::min<Eigen::Index>(19, cfg.n - 1);
  for (double eps : cfg.epsilons) {
    result.certificates.push_back(beta_bound_certificate(
        result.truth, result.analysis, l, result.beta, result.beta_tilde, eps));
  }
  const double eps_star = tight_epsilon(result.truth, result.analysis, l);
  if (eps_star > 0.0) {
    result.certificates.push_back(
        beta_bound_certificate(result.truth, result.analysis, l, result.beta,
                               result.beta_tilde, eps_star, /*tight=*/true));
  }
  for (double eps : cfg.epsilons) {
    result.certificates.push_back(mean_bound_certificate(
        result.truth, result.analysis, l, result.sampled_moments.mean,
        result.estimated_moments.mean, eps));
  }
  if (eps_star > 0.0) {
    result.certificates.push_back(mean_bound_certificate(
        result.truth, result.analysis, l, result.sampled_moments.mean,
        result.estimated_moments.mean, eps_star, /*tight=*/true));
  }
  for (double eps : cfg.epsilons) {
    result.certificates.push_back(cov_bound_certificate(
        result.truth, result.analysis, l, result.beta, result.beta_tilde,
        result.sampled_moments, result.estimated_moments, eps, cert_entry, cert_entry));
  }

  result.counters.model_error = rng_model.counter();
  result.counters.observation_noise = rng_obs.counter();
  result.counters.init = rng_init.counter();
  return result;
}

OutputManifest write_outputs(const ExperimentResult& result,
                             const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());

  OutputManifest manifest;
  const auto emit = [&](const std::string& name, const auto& payload) {
    const std::filesystem::path path = dir / name;
    write_csv(path, payload);
    manifest.entries.push_back(
        {name, std::filesystem::file_size(path), to_hex(fnv1a64_file(path))});
  };

  emit("hovmoller.csv", result.hovmoller);
  emit("mu_true.csv", result.prescribed_mean);
  emit("mu_sampled.csv", result.sampled_moments.mean);
  emit("mu_estimated.csv", result.estimated_moments.mean);
  emit("Q_true.csv", result.prescribed_cov);
  emit("Q_sampled.csv", result.sampled_moments.cov);
  emit("Q_estimated.csv", result.estimated_moments.cov);
  emit("Q_absdiff_sampled_true.csv", result.report.cov_sampled_vs_prescribed);
  emit("Q_absdiff_sampled_estimated.csv", result.report.cov_sampled_vs_estimated);
  emit("Q_absdiff_true_estimated.csv", result.report.cov_prescribed_vs_estimated);
  emit("beta.csv", sequence_as_matrix(result.beta));
  emit("beta_tilde.csv", sequence_as_matrix(result.beta_tilde));

  const ExperimentConfig& cfg = result.config;
  ordered_json summary;
  summary["config"] = ordered_json{{"N", cfg.n},
                                   {"steps", cfg.steps},
                                   {"dt", cfg.dt},
                                   {"seed", cfg.seed},
                                   {"R_variance", cfg.r_variance},
                                   {"B_variance", cfg.b_variance},
                                   {"spinup_steps", cfg.spinup_steps},
                                   {"cyclic_cov", cfg.cyclic_cov},
                                   {"model_error_scale", cfg.model_error_scale},
                                   {"output_dir", cfg.output_dir},
                                   {"epsilons", cfg.epsilons}};
  summary["decisions"] = ordered_json{
      {"truth_init",
       "equilibrium with +0.01 on component 1, then " +
           std::to_string(cfg.spinup_steps) + " discarded spin-up steps"},
      {"analysis_init", "first forecast = initial truth + standard normal draw"},
      {"integrator", "classical RK4, one step per assimilation timestep"},
      {"vector_norm", "max (infinity) norm"},
      {"cov_accumulation", "sequential two-pass, single block"},
      {"rng", "splitmix64 counter-based; Box-Muller normals"}};
  summary["rng_counters"] = ordered_json{
      {"model_error", result.counters.model_error},
      {"observation_noise", result.counters.observation_noise},
      {"init", result.counters.init}};
  summary["lipschitz"] = ordered_json{
      {"value", result.lipschitz.value},
      {"jacobian_sup_truth", result.lipschitz.jacobian_sup_truth},
      {"jacobian_sup_analysis", result.lipschitz.jacobian_sup_analysis},
      {"paired_secant_max", result.lipschitz.paired_secant_max},
      {"states_visited", result.lipschitz.states_visited},
      {"method",
       "max of flow-Jacobian infinity norms over truth and analysis states "
       "and of paired truth/analysis secant ratios (trajectory-local lower "
       "bound on any global constant)"}};
  summary["analysis_error"] = ordered_json{
      {"hovmoller_max", result.hovmoller_max},
      {"rms", result.analysis_rms},
      {"max_inf_norm", result.max_analysis_error}};
  summary["moment_errors"] = ordered_json{
      {"max_mean_sampled_vs_prescribed", result.report.max_mean_sampled_vs_prescribed},
      {"max_mean_sampled_vs_estimated", result.report.max_mean_sampled_vs_estimated},
      {"max_mean_prescribed_vs_estimated",
       result.report.max_mean_prescribed_vs_estimated},
      {"max_cov_sampled_vs_prescribed", result.report.max_cov_sampled_vs_prescribed},
      {"max_cov_sampled_vs_estimated", result.report.max_cov_sampled_vs_estimated},
      {"max_cov_prescribed_vs_estimated",
       result.report.max_cov_prescribed_vs_estimated}};
  summary["certificates"] = ordered_json::array();
  for (const BoundCertificate& cert : result.certificates)
    summary["certificates"].push_back(certificate_json(cert));

  {
    const std::filesystem::path path = dir / "summary.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << summary.dump(2) << '\n';
    out.close();
    if (!out) throw IoError("write failed: " + path.string());
    manifest.entries.push_back(
        {"summary.json", std::filesystem::file_size(path), to_hex(fnv1a64_file(path))});
  }

  ordered_json mj;
  mj["files"] = ordered_json::array();
  for (const OutputManifest::Entry& e : manifest.entries) {
    mj["files"].push_back(
        ordered_json{{"name", e.name}, {"bytes", e.bytes}, {"fnv1a64", e.fnv1a64}});
  }
  {
    const std::filesystem::path path = dir / "manifest.json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << mj.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
  }
  return manifest;
}

std::string compare_runs(const std::filesystem::path& dir_a,
                         const std::filesystem::path& dir_b) {
  const auto load = [](const std::filesystem::path& dir) {
    const std::filesystem::path path = dir / "summary.json";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open summary: " + path.string());
    ordered_json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw IoError("malformed summary " + path.string() + ": " + e.what());
    }
    return j;
  };

  const ordered_json a = load(dir_a);
  const ordered_json b = load(dir_b);

  const auto ratio = [&](const char* group, const char* key) -> ordered_json {
    const double num = a.at(group).at(key).get<double>();
    const double den = b.at(group).at(key).get<double>();
    if (den == 0.0) return nullptr;
    return num / den;
  };

  ordered_json out;
  out["a"] = dir_a.string();
  out["b"] = dir_b.string();
  out["analysis_error_ratio"] = ordered_json{
      {"rms", ratio("analysis_error", "rms")},
      {"hovmoller_max", ratio("analysis_error", "hovmoller_max")}};
  out["moment_error_ratio"] = ordered_json{
      {"max_mean_sampled_vs_estimated",
       ratio("moment_errors", "max_mean_sampled_vs_estimated")},
      {"max_mean_sampled_vs_prescribed",
       ratio("moment_errors", "max_mean_sampled_vs_prescribed")},
      {"max_mean_prescribed_vs_estimated",
       ratio("moment_errors", "max_mean_prescribed_vs_estimated")},
      {"max_cov_sampled_vs_estimated",
       ratio("moment_errors", "max_cov_sampled_vs_estimated")},
      {"max_cov_sampled_vs_prescribed",
       ratio("moment_errors", "max_cov_sampled_vs_prescribed")},
      {"max_cov_prescribed_vs_estimated",
       ratio("moment_errors", "max_cov_prescribed_vs_estimated")}};
  return out.dump(2) + "\n";
}

}  // namespace merr
