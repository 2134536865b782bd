#include "merr/assimilation.hpp"

#include <algorithm>
#include <set>

#include "merr/errors.hpp"

namespace merr {

ObservationOperator::ObservationOperator(Eigen::Index state_dim, bool identity,
                                         std::vector<Eigen::Index> indices)
    : state_dim_(state_dim), identity_(identity), indices_(std::move(indices)) {}

ObservationOperator ObservationOperator::identity(Eigen::Index state_dim) {
  if (state_dim < 0) throw ValidationError("ObservationOperator: negative dimension");
  return ObservationOperator(state_dim, true, {});
}

ObservationOperator ObservationOperator::selection(Eigen::Index state_dim,
                                                   std::vector<Eigen::Index> indices) {
  if (state_dim < 1) throw ValidationError("ObservationOperator: empty state space");
  if (indices.empty()) throw ValidationError("ObservationOperator: empty selection");
  std::set<Eigen::Index> seen;
  for (Eigen::Index i : indices) {
    if (i < 0 || i >= state_dim)
      throw ValidationError("ObservationOperator: index out of range");
    if (!seen.insert(i).second)
      throw ValidationError("ObservationOperator: duplicate index");
  }
  return ObservationOperator(state_dim, false, std::move(indices));
}

StateVector ObservationOperator::apply(const StateVector& x) const {
  if (x.size() != state_dim_)
    throw ValidationError("ObservationOperator: state dimension mismatch");
  if (identity_) return x;
  StateVector y(static_cast<Eigen::Index>(indices_.size()));
  for (std::size_t k = 0; k < indices_.size(); ++k) y[static_cast<Eigen::Index>(k)] = x[indices_[k]];
  return y;
}

Matrix ObservationOperator::dense() const {
  Matrix h = Matrix::Zero(obs_dim(), state_dim_);
  if (identity_) {
    h.setIdentity();
  } else {
    for (std::size_t k = 0; k < indices_.size(); ++k)
      h(static_cast<Eigen::Index>(k), indices_[k]) = 1.0;
  }
  return h;
}

void AssimilationConfig::validate() const {
  const Eigen::Index n = obs_operator.state_dim();
  const Eigen::Index m = obs_operator.obs_dim();
  if (n < 1) throw ValidationError("AssimilationConfig: empty state space");
  if (background_cov.rows() != n || background_cov.cols() != n)
    throw ValidationError("AssimilationConfig: B has wrong shape");
  if (observation_cov.rows() != m || observation_cov.cols() != m)
    throw ValidationError("AssimilationConfig: R has wrong shape");
  validate_covariance(background_cov);
  validate_covariance(observation_cov);
}

StateVector observe(const StateVector& truth, const ObservationOperator& h,
                    const Matrix& r_sqrt, RngStream& rng) {
  const Eigen::Index m = h.obs_dim();
  if (r_sqrt.rows() != m || r_sqrt.cols() != m)
    throw ValidationError("observe: R_sqrt has wrong shape");
  return h.apply(truth) + r_sqrt * rng.normal_vector(m);
}

StateVector threedvar_analysis(const StateVector& forecast, const StateVector& y,
                               const AssimilationConfig& cfg) {
  cfg.validate();
  const ObservationOperator& h = cfg.obs_operator;
  if (forecast.size() != h.state_dim())
    throw ValidationError("threedvar_analysis: forecast dimension mismatch");
  if (y.size() != h.obs_dim())
    throw ValidationError("threedvar_analysis: observation dimension mismatch");
  if (!all_finite(forecast) || !all_finite(y))
    throw ValidationError("threedvar_analysis: non-finite input");

  const StateVector innovation = y - h.apply(forecast);

  Matrix hbht;  // H B H^T, obs space
  if (h.is_identity()) {
    hbht = cfg.background_cov;
  } else {
    const auto& idx = h.indices();
    hbht.resize(h.obs_dim(), h.obs_dim());
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < idx.size(); ++c)
        hbht(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            cfg.background_cov(idx[r], idx[c]);
  }
  const Matrix normal = hbht + cfg.observation_cov;

  Eigen::LDLT<Matrix> ldlt(normal);
  if (ldlt.info() != Eigen::Success)
    throw IllPosedAnalysisError("threedvar_analysis: LDLT factorization failed");
  const StateVector weights = ldlt.solve(innovation);

  // Residual check catches singular or indefinite systems that the
  // factorization itself does not reject.
  const double residual = max_abs(StateVector(normal * weights - innovation));
  const double scale = std::max({1.0, max_abs(innovation),
                                 inf_norm(normal) * max_abs(weights)});
  if (!all_finite(weights) || residual > 1e-9 * scale)
    throw IllPosedAnalysisError("threedvar_analysis: H B H^T + R is singular");

  // x_a = x_f + B H^T w
  StateVector correction;
  if (h.is_identity()) {
    correction = cfg.background_cov * weights;
  } else {
    const auto& idx = h.indices();
    correction = StateVector::Zero(h.state_dim());
    for (std::size_t c = 0; c < idx.size(); ++c)
      correction += cfg.background_cov.col(idx[c]) * weights[static_cast<Eigen::Index>(c)];
  }
  return forecast + correction;
}

}  // namespace merr
