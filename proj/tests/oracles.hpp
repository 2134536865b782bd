// Independent oracles for the test suite. Everything here recomputes results
// through a different route than the library (naive double loops, finite
// differences, iterative minimization, closed forms) so agreement is
// meaningful.
#pragma once

#include <random>

#include "merr/assimilation.hpp"
#include "merr/dynamics.hpp"
#include "merr/types.hpp"

namespace merr::oracles {

/// Naive double-loop sample mean.
inline StateVector brute_force_mean(const ErrorSequence& samples) {
  const Eigen::Index n = samples.front().size();
  StateVector mu = StateVector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (const StateVector& s : samples) acc += s[i];
    mu[i] = acc / static_cast<double>(samples.size());
  }
  return mu;
}

/// Naive entry-by-entry sample covariance with divisor tau-1.
inline Matrix brute_force_cov(const ErrorSequence& samples) {
  const Eigen::Index n = samples.front().size();
  const StateVector mu = brute_force_mean(samples);
  Matrix q = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (const StateVector& s : samples) acc += (s[i] - mu[i]) * (s[j] - mu[j]);
      q(i, j) = acc / static_cast<double>(samples.size() - 1);
    }
  }
  return q;
}

/// Central finite differences of rk4_step.
inline Matrix finite_difference_flow_jacobian(const TendencyModel& model,
                                              const StateVector& x, double dt,
                                              double h = 1e-6) {
  const Eigen::Index n = x.size();
  Matrix j(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    StateVector xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    j.col(c) = (rk4_step(model, xp, dt) - rk4_step(model, xm, dt)) / (2.0 * h);
  }
  return j;
}

/// One-step RK4 amplification factor for dx/dt = -x.
inline double rk4_decay_factor(double h) {
  return 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
}

/// Closed-form RK4 flow Jacobian for dx/dt = A x:
/// I + dtA + (dtA)^2/2 + (dtA)^3/6 + (dtA)^4/24.
inline Matrix linear_rk4_flow_jacobian(const Matrix& a, double dt) {
  const Eigen::Index n = a.rows();
  const Matrix m = dt * a;
  const Matrix m2 = m * m;
  return Matrix::Identity(n, n) + m + m2 / 2.0 + m2 * m / 6.0 + m2 * m2 / 24.0;
}

/// Steepest descent with exact line search on the 3DVar quadratic cost.
/// Uses only the cost gradient assembled from explicit inverses, never the
/// closed-form gain.
inline StateVector gradient_descent_threedvar(const StateVector& forecast,
                                              const StateVector& y,
                                              const AssimilationConfig& cfg,
                                              int max_iter = 100000,
                                              double grad_tol = 1e-13) {
  const Matrix b_inv = cfg.background_cov.inverse();
  const Matrix r_inv = cfg.observation_cov.inverse();
  const Matrix h = cfg.obs_operator.dense();
  const Matrix hessian = b_inv + h.transpose() * r_inv * h;

  StateVector x = forecast;
  for (int it = 0; it < max_iter; ++it) {
    const StateVector grad = b_inv * (x - forecast) - h.transpose() * (r_inv * (y - h * x));
    if (max_abs(grad) < grad_tol) break;
    const double denom = grad.dot(hessian * grad);
    if (denom <= 0.0) break;
    x -= (grad.squaredNorm() / denom) * grad;
  }
  return x;
}

/// Fixture helpers on top of std::mt19937_64 (independent of the library's
/// own generator).
inline StateVector random_vector(std::mt19937_64& gen, Eigen::Index n, double lo,
                                 double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  StateVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(gen);
  return v;
}

inline Matrix random_matrix(std::mt19937_64& gen, Eigen::Index rows, Eigen::Index cols,
                            double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = dist(gen);
  return m;
}

/// Well-conditioned random SPD matrix (A A^T + ridge I).
inline Matrix random_spd(std::mt19937_64& gen, Eigen::Index n, double ridge = 0.5) {
  const Matrix a = random_matrix(gen, n, n, -1.0, 1.0);
  return a * a.transpose() + ridge * Matrix::Identity(n, n);
}

}  // namespace merr::oracles
