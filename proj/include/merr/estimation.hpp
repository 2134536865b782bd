#pragma once

#include "merr/dynamics.hpp"
#include "merr/types.hpp"

namespace merr {

/// Sample mean and covariance of an error sequence.
struct MomentEstimate {
  StateVector mean;
  Matrix cov;
  long sample_count = 0;
};

/// Pairwise absolute differences between the three moment pairs of a run:
/// sampled (mu, Q) from the realized errors, estimated (mu~, Q~) from the
/// residuals, and the prescribed generating moments (mu_bar, Q_bar).
struct MomentErrorReport {
  StateVector mean_sampled_vs_prescribed;  // |mu - mu_bar|
  StateVector mean_sampled_vs_estimated;   // |mu - mu~|
  StateVector mean_prescribed_vs_estimated;  // |mu_bar - mu~|
  Matrix cov_sampled_vs_prescribed;        // |Q - Q_bar|  (sampling error)
  Matrix cov_sampled_vs_estimated;         // |Q - Q~|
  Matrix cov_prescribed_vs_estimated;      // |Q_bar - Q~|

  double max_mean_sampled_vs_prescribed = 0.0;
  double max_mean_sampled_vs_estimated = 0.0;
  double max_mean_prescribed_vs_estimated = 0.0;
  double max_cov_sampled_vs_prescribed = 0.0;
  double max_cov_sampled_vs_estimated = 0.0;
  double max_cov_prescribed_vs_estimated = 0.0;
};

/// Residual model-error estimates: beta~^k = x^{k+1} - f(x^k) for
/// k = 0..tau-2, so tau states yield tau-1 samples.
ErrorSequence residual_sequence(const Trajectory& analysis, const FlowMap& model);

/// Arithmetic mean per component.
StateVector sample_mean(const ErrorSequence& seq);

/// Two-pass sample covariance (mean first, then centered outer products)
/// with divisor tau-1.
Matrix sample_cov(const ErrorSequence& seq);

MomentEstimate estimate_moments(const ErrorSequence& seq);

MomentErrorReport moment_error_report(const MomentEstimate& sampled,
                                      const MomentEstimate& estimated,
                                      const StateVector& prescribed_mean,
                                      const Matrix& prescribed_cov);

}  // namespace merr
