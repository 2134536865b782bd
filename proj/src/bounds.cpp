#include "merr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "merr/errors.hpp"

namespace merr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_aligned(const Trajectory& truth, const Trajectory& analysis) {
  if (truth.size() != analysis.size() || truth.size() < 2)
    throw ValidationError("bounds: trajectories misaligned or too short");
  for (std::size_t k = 0; k < truth.size(); ++k) {
    if (truth[k].size() != analysis[k].size())
      throw ValidationError("bounds: state dimension mismatch at step " + std::to_string(k));
  }
}

double max_trajectory_error(const Trajectory& truth, const Trajectory& analysis) {
  double err = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    err = std::max(err, max_abs(StateVector(truth[k] - analysis[k])));
  return err;
}

BoundCertificate finish(BoundCertificate cert) {
  cert.vacuous = !cert.hypothesis_met;
  cert.bound_rhs = cert.epsilon;
  if (!cert.hypothesis_met) {
    cert.passed = true;  // nothing asserted
  } else if (cert.tight) {
    cert.passed = cert.measured_lhs <= cert.bound_rhs;
  } else {
    cert.passed = cert.measured_lhs < cert.bound_rhs;
  }
  return cert;
}

}  // namespace

std::string theorem_name(TheoremKind kind) {
  switch (kind) {
    case TheoremKind::ProductLemma: return "product-lemma";
    case TheoremKind::BetaBound: return "beta-bound";
    case TheoremKind::MeanBound: return "mean-bound";
    case TheoremKind::CovEntryBound: return "cov-entry-bound";
  }
  return "unknown";
}

BoundCertificate check_product_bound(double f, double g, double l, double m,
                                     double eps) {
  if (!(eps > 0.0)) throw ValidationError("check_product_bound: eps must be > 0");

  const double f_thr = std::min(1.0, m == 0.0 ? kInf : eps / (2.0 * std::abs(m)));
  const double g_thr = std::min(1.0, eps / (2.0 * std::abs(l) + 2.0));
  const double f_err = std::abs(f - l);
  const double g_err = std::abs(g - m);

  BoundCertificate cert;
  cert.theorem = TheoremKind::ProductLemma;
  cert.epsilon = eps;
  cert.hypothesis_met = f_err < f_thr && g_err < g_thr;
  cert.measured_lhs = std::abs(f * g - l * m);
  cert.hypothesis_lhs = std::max(f_err / f_thr, g_err / g_thr);
  cert.hypothesis_rhs = 1.0;
  return finish(cert);
}

double tight_epsilon(const Trajectory& truth, const Trajectory& analysis, double l) {
  require_aligned(truth, analysis);
  if (!(l >= 0.0)) throw ValidationError("tight_epsilon: L must be >= 0");
  return (l + 1.0) * max_trajectory_error(truth, analysis);
}

BoundCertificate beta_bound_certificate(const Trajectory& truth,
                                        const Trajectory& analysis, double l,
                                        const ErrorSequence& true_beta,
                                        const ErrorSequence& est_beta, double eps,
                                        bool tight) {
  require_aligned(truth, analysis);
  if (true_beta.size() != truth.size() - 1 || est_beta.size() != true_beta.size())
    throw ValidationError("beta_bound_certificate: error sequences misaligned");
  if (!(l >= 0.0)) throw ValidationError("beta_bound_certificate: L must be >= 0");
  if (!(eps > 0.0)) throw ValidationError("beta_bound_certificate: eps must be > 0");

  const double max_err = max_trajectory_error(truth, analysis);

  BoundCertificate cert;
  cert.theorem = TheoremKind::BetaBound;
  cert.epsilon = eps;
  cert.tight = tight;
  cert.lipschitz = l;
  cert.hypothesis_lhs = max_err;
  cert.hypothesis_rhs = eps / (l + 1.0);
  cert.tight_epsilon = (l + 1.0) * max_err;
  cert.hypothesis_met = tight ? true : max_err < cert.hypothesis_rhs;

  for (std::size_t k = 0; k < true_beta.size(); ++k) {
    const double d = max_abs(StateVector(est_beta[k] - true_beta[k]));
    if (d >= cert.measured_lhs) {
      cert.measured_lhs = d;
      cert.worst_sample = static_cast<long>(k);
    }
  }
  return finish(cert);
}

BoundCertificate mean_bound_certificate(const Trajectory& truth,
                                        const Trajectory& analysis, double l,
                                        const StateVector& true_mu,
                                        const StateVector& est_mu, double eps,
                                        bool tight) {
  require_aligned(truth, analysis);
  if (true_mu.size() != est_mu.size() || true_mu.size() != truth.front().size())
    throw ValidationError("mean_bound_certificate: mean dimension mismatch");
  if (!(l >= 0.0)) throw ValidationError("mean_bound_certificate: L must be >= 0");
  if (!(eps > 0.0)) throw ValidationError("mean_bound_certificate: eps must be > 0");

  const double max_err = max_trajectory_error(truth, analysis);

  BoundCertificate cert;
  cert.theorem = TheoremKind::MeanBound;
  cert.epsilon = eps;
  cert.tight = tight;
  cert.lipschitz = l;
  cert.hypothesis_lhs = max_err;
  cert.hypothesis_rhs = eps / (l + 1.0);
  cert.tight_epsilon = (l + 1.0) * max_err;
  cert.hypothesis_met = tight ? true : max_err < cert.hypothesis_rhs;
  cert.measured_lhs = max_abs(StateVector(est_mu - true_mu));
  return finish(cert);
}

AccuracyRequirement cov_accuracy_requirement(double eps,
                                             const ErrorSequence& true_beta,
                                             const StateVector& mu, double l,
                                             Eigen::Index i, Eigen::Index j) {
  if (!(eps > 0.0)) throw ValidationError("cov_accuracy_requirement: eps must be > 0");
  if (!(l >= 0.0)) throw ValidationError("cov_accuracy_requirement: L must be >= 0");
  if (true_beta.size() < 2)
    throw ValidationError("cov_accuracy_requirement: need at least 2 samples");
  const Eigen::Index n = mu.size();
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw ValidationError("cov_accuracy_requirement: component index out of range");

  const double tau = static_cast<double>(true_beta.size());
  const double factor = (tau - 1.0) / tau;
  const double mu_i = std::abs(mu[i]);
  const double mu_j = std::abs(mu[j]);

  AccuracyRequirement req;
  req.comp_i = i;
  req.comp_j = j;
  req.lipschitz = l;
  req.per_sample_i.reserve(true_beta.size());
  req.per_sample_j.reserve(true_beta.size());

  for (const StateVector& beta : true_beta) {
    if (beta.size() != n)
      throw ValidationError("cov_accuracy_requirement: sample dimension mismatch");
    const double b_i = std::abs(beta[i]);
    const double b_j = std::abs(beta[j]);

    double t_i = 1.0;
    t_i = std::min(t_i, b_j == 0.0 ? kInf : eps * factor / (8.0 * b_j));
    t_i = std::min(t_i, mu_j == 0.0 ? kInf : eps * factor / (8.0 * mu_j));

    double t_j = 1.0;
    t_j = std::min(t_j, eps * factor / (8.0 * b_i + 8.0));
    t_j = std::min(t_j, eps * factor / (8.0 * mu_i + 8.0));

    req.per_sample_i.push_back(t_i / (l + 1.0));
    req.per_sample_j.push_back(t_j / (l + 1.0));
  }

  req.uniform_i = *std::min_element(req.per_sample_i.begin(), req.per_sample_i.end());
  req.uniform_j = *std::min_element(req.per_sample_j.begin(), req.per_sample_j.end());
  return req;
}

bool AccuracyRequirement::satisfied_by(const Trajectory& truth,
                                       const Trajectory& analysis) const {
  return worst_ratio(truth, analysis) < 1.0;
}

double AccuracyRequirement::worst_ratio(const Trajectory& truth,
                                        const Trajectory& analysis) const {
  require_aligned(truth, analysis);
  double worst = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double err_i = std::abs(truth[k][comp_i] - analysis[k][comp_i]);
    const double err_j = std::abs(truth[k][comp_j] - analysis[k][comp_j]);
    worst = std::max({worst, err_i / uniform_i, err_j / uniform_j});
  }
  return worst;
}

BoundCertificate cov_bound_certificate(const Trajectory& truth,
                                       const Trajectory& analysis, double l,
                                       const ErrorSequence& true_beta,
                                       const ErrorSequence& est_beta,
                                       const MomentEstimate& sampled_moments,
                                       const MomentEstimate& est_moments,
                                       double eps, Eigen::Index i, Eigen::Index j) {
  require_aligned(truth, analysis);
  if (true_beta.size() != truth.size() - 1 || est_beta.size() != true_beta.size())
    throw ValidationError("cov_bound_certificate: error sequences misaligned");
  if (sampled_moments.cov.rows() != est_moments.cov.rows())
    throw ValidationError("cov_bound_certificate: moment dimension mismatch");

  const AccuracyRequirement req =
      cov_accuracy_requirement(eps, true_beta, sampled_moments.mean, l, i, j);

  BoundCertificate cert;
  cert.theorem = TheoremKind::CovEntryBound;
  cert.epsilon = eps;
  cert.lipschitz = l;
  cert.entry_i = static_cast<int>(i);
  cert.entry_j = static_cast<int>(j);
  cert.hypothesis_lhs = req.worst_ratio(truth, analysis);
  cert.hypothesis_rhs = 1.0;
  cert.hypothesis_met = cert.hypothesis_lhs < 1.0;
  cert.measured_lhs = std::abs(sampled_moments.cov(i, j) - est_moments.cov(i, j));
  return finish(cert);
}

}  // namespace merr
