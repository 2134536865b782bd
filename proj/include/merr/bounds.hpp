#pragma once

#include <string>
#include <vector>

#include "merr/estimation.hpp"
#include "merr/types.hpp"

namespace merr {

enum class TheoremKind {
  ProductLemma,    // |fg - LM| < eps from proximity of the factors
  BetaBound,       // per-step residual error  |beta~^k - beta^k| < eps
  MeanBound,       // mean error               |mu~ - mu| < eps
  CovEntryBound,   // covariance entry error   |Q_ij - Q~_ij| < eps
};

std::string theorem_name(TheoremKind kind);

/// Record of one numerical certification: were the hypothesis thresholds
/// met, what was measured, and did the claimed bound hold. A certificate
/// with an unmet hypothesis is vacuous (nothing is asserted), never failed.
struct BoundCertificate {
  TheoremKind theorem = TheoremKind::BetaBound;
  double epsilon = 0.0;
  bool hypothesis_met = false;
  bool vacuous = true;       // == !hypothesis_met
  double measured_lhs = 0.0;
  double bound_rhs = 0.0;    // == epsilon
  bool passed = false;       // hypothesis_met ? measured_lhs < bound_rhs : true

  /// Built at the tight implied bound eps* = (L+1) max_k |x_t - x_a|_inf;
  /// the hypothesis holds by construction and the comparison is non-strict.
  bool tight = false;

  double lipschitz = 0.0;        // L the hypothesis was evaluated with
  double hypothesis_lhs = 0.0;   // measured hypothesis quantity
  double hypothesis_rhs = 0.0;   // threshold it was compared against
  double tight_epsilon = 0.0;    // (L+1) max analysis error, when trajectories given
  long worst_sample = -1;        // sample index attaining measured_lhs
  int entry_i = -1;              // covariance entry, when applicable
  int entry_j = -1;
};

/// Hypothesis check for |fg - LM| < eps:
///   |f - L| < min{1, eps / (2|M|)}   (+inf branch when M = 0)
///   |g - M| < min{1, eps / (2|L| + 2)}
/// hypothesis_lhs records the worst error/threshold ratio (rhs = 1).
BoundCertificate check_product_bound(double f, double g, double l, double m,
                                     double eps);

/// The smallest eps whose hypothesis the given trajectories satisfy:
/// (L+1) * max_k |x_t^k - x_a^k|_inf.
double tight_epsilon(const Trajectory& truth, const Trajectory& analysis, double l);

/// Per-step residual-error bound: if max_k |x_t^k - x_a^k|_inf < eps/(L+1)
/// then max_k |beta~^k - beta^k|_inf < eps. `tight` builds the certificate
/// at eps* (hypothesis holds by construction, non-strict comparison).
BoundCertificate beta_bound_certificate(const Trajectory& truth,
                                        const Trajectory& analysis, double l,
                                        const ErrorSequence& true_beta,
                                        const ErrorSequence& est_beta, double eps,
                                        bool tight = false);

/// Mean-error bound under the same hypothesis; measured_lhs = |mu~ - mu|_inf.
BoundCertificate mean_bound_certificate(const Trajectory& truth,
                                        const Trajectory& analysis, double l,
                                        const StateVector& true_mu,
                                        const StateVector& est_mu, double eps,
                                        bool tight = false);

/// Per-timestep analysis-accuracy thresholds sufficient for
/// |Q_ij - Q~_ij| < eps. With tau = sample count and factor (tau-1)/tau:
///   component i at sample k:
///     (1/(L+1)) min{1, eps/(8|beta^k_j|) f, eps/(8|mu_j|) f}
///   component j at sample k:
///     (1/(L+1)) min{1, eps/(8(|beta^k_i|+1)) f, eps/(8(|mu_i|+1)) f}
/// Zero denominators give the +inf branch. The mean-error part of the
/// underlying argument needs every sample's threshold at once, so the bound
/// actually enforced on each state error is the minimum over samples
/// (uniform_i / uniform_j below); the per-sample vectors are kept for the
/// breakdown.
struct AccuracyRequirement {
  Eigen::Index comp_i = 0;
  Eigen::Index comp_j = 0;
  double lipschitz = 0.0;
  std::vector<double> per_sample_i;
  std::vector<double> per_sample_j;
  double uniform_i = 0.0;  // min over samples of per_sample_i
  double uniform_j = 0.0;

  /// True when every state error in components i and j is strictly below
  /// the uniform thresholds.
  bool satisfied_by(const Trajectory& truth, const Trajectory& analysis) const;

  /// max over states of |error| / threshold, for the breakdown.
  double worst_ratio(const Trajectory& truth, const Trajectory& analysis) const;
};

AccuracyRequirement cov_accuracy_requirement(double eps,
                                             const ErrorSequence& true_beta,
                                             const StateVector& mu, double l,
                                             Eigen::Index i, Eigen::Index j);

/// Covariance-entry bound: if the analysis errors in components i and j meet
/// cov_accuracy_requirement at every step, then |Q_ij - Q~_ij| < eps.
BoundCertificate cov_bound_certificate(const Trajectory& truth,
                                       const Trajectory& analysis, double l,
                                       const ErrorSequence& true_beta,
                                       const ErrorSequence& est_beta,
                                       const MomentEstimate& sampled_moments,
                                       const MomentEstimate& est_moments,
                                       double eps, Eigen::Index i, Eigen::Index j);

}  // namespace merr
