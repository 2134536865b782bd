#pragma once

#include <Eigen/Dense>

#include <vector>

namespace merr {

using StateVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Time-indexed sequence of states x^0, x^1, ..., x^{tau-1}.
using Trajectory = std::vector<StateVector>;

/// Per-timestep model-error vectors beta^k (or their residual estimates),
/// one per model step: a trajectory of tau states carries tau-1 of them.
using ErrorSequence = std::vector<StateVector>;

inline bool all_finite(const StateVector& v) { return v.allFinite(); }
inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline double max_abs(const StateVector& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// Induced infinity norm (maximum absolute row sum).
inline double inf_norm(const Matrix& m) {
  return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace merr
