#pragma once

#include <vector>

#include "merr/stochastic.hpp"
#include "merr/types.hpp"

namespace merr {

/// Linear observation operator: either the identity or a selection of state
/// components (0-based indices, unique, within range).
class ObservationOperator {
 public:
  static ObservationOperator identity(Eigen::Index state_dim);
  static ObservationOperator selection(Eigen::Index state_dim,
                                       std::vector<Eigen::Index> indices);

  StateVector apply(const StateVector& x) const;

  Eigen::Index state_dim() const noexcept { return state_dim_; }
  Eigen::Index obs_dim() const noexcept {
    return identity_ ? state_dim_ : static_cast<Eigen::Index>(indices_.size());
  }
  bool is_identity() const noexcept { return identity_; }
  const std::vector<Eigen::Index>& indices() const noexcept { return indices_; }

  /// Dense obs_dim x state_dim matrix form.
  Matrix dense() const;

 private:
  ObservationOperator(Eigen::Index state_dim, bool identity,
                      std::vector<Eigen::Index> indices);

  Eigen::Index state_dim_;
  bool identity_;
  std::vector<Eigen::Index> indices_;
};

/// Static covariances and observation operator for sequential 3DVar.
struct AssimilationConfig {
  Matrix background_cov;   // B, state_dim x state_dim
  Matrix observation_cov;  // R, obs_dim x obs_dim
  ObservationOperator obs_operator = ObservationOperator::identity(0);

  void validate() const;
};

/// y = H(x_t) + R_sqrt z with z iid standard normal from the stream.
StateVector observe(const StateVector& truth, const ObservationOperator& h,
                    const Matrix& r_sqrt, RngStream& rng);

/// Minimizer of 1/2 (x-x_f)^T B^-1 (x-x_f) + 1/2 (y-Hx)^T R^-1 (y-Hx),
/// computed via the closed-form linear update
///   x_a = x_f + B H^T (H B H^T + R)^-1 (y - H x_f).
/// The inner system is solved with a pivoted LDLT factorization; the explicit
/// inverse is never formed. A singular (or numerically unusable) H B H^T + R
/// throws IllPosedAnalysisError.
StateVector threedvar_analysis(const StateVector& forecast, const StateVector& y,
                               const AssimilationConfig& cfg);

}  // namespace merr
