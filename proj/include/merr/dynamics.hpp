#pragma once

#include <memory>

#include "merr/stochastic.hpp"
#include "merr/types.hpp"

namespace merr {

/// Right-hand side of an autonomous ODE dx/dt = g(x), with its Jacobian.
class TendencyModel {
 public:
  virtual ~TendencyModel() = default;
  virtual StateVector tendency(const StateVector& x) const = 0;
  virtual Matrix tendency_jacobian(const StateVector& x) const = 0;
};

/// dx_i/dt = -x_{i-2} x_{i-1} + x_{i-1} x_{i+1} - x_i + F with cyclic
/// indices. Needs n >= 4 so the four referenced indices are distinct.
class Lorenz96 : public TendencyModel {
 public:
  explicit Lorenz96(double forcing = 8.0) : forcing_(forcing) {}

  StateVector tendency(const StateVector& x) const override;
  Matrix tendency_jacobian(const StateVector& x) const override;

  double forcing() const noexcept { return forcing_; }

  /// The fixed point with every component equal to the forcing.
  StateVector equilibrium(Eigen::Index n) const;

 private:
  double forcing_;
};

/// dx/dt = A x (test model; closed-form flow and Jacobian).
class LinearTendency : public TendencyModel {
 public:
  explicit LinearTendency(Matrix a) : a_(std::move(a)) {}

  StateVector tendency(const StateVector& x) const override { return a_ * x; }
  Matrix tendency_jacobian(const StateVector&) const override { return a_; }

  const Matrix& matrix() const noexcept { return a_; }

 private:
  Matrix a_;
};

/// dx/dt = c (test model; the RK4 step adds exactly dt * c).
class ConstantTendency : public TendencyModel {
 public:
  explicit ConstantTendency(StateVector c) : c_(std::move(c)) {}

  StateVector tendency(const StateVector&) const override { return c_; }
  Matrix tendency_jacobian(const StateVector& x) const override {
    return Matrix::Zero(x.size(), x.size());
  }

 private:
  StateVector c_;
};

StateVector lorenz96_tendency(const StateVector& x, double forcing = 8.0);

/// Classical 4-stage Runge-Kutta advance. dt = 0 returns the state unchanged.
StateVector rk4_step(const TendencyModel& model, const StateVector& x, double dt);

/// Exact tangent-linear of rk4_step (chain rule through all four stages),
/// not of the continuous ODE.
Matrix rk4_flow_jacobian(const TendencyModel& model, const StateVector& x, double dt);

/// Discrete model map x^{k+1} = f(x^k).
class FlowMap {
 public:
  virtual ~FlowMap() = default;
  virtual StateVector apply(const StateVector& x) const = 0;
  virtual Matrix jacobian(const StateVector& x) const = 0;
};

/// One RK4 step of a tendency model; this composite map is the f used by
/// the twin experiment.
class Rk4Flow : public FlowMap {
 public:
  Rk4Flow(std::shared_ptr<const TendencyModel> model, double dt);

  StateVector apply(const StateVector& x) const override;
  Matrix jacobian(const StateVector& x) const override;

  double dt() const noexcept { return dt_; }

 private:
  std::shared_ptr<const TendencyModel> model_;
  double dt_;
};

/// f(x) = A x + b. Its exact Lipschitz constant in the max norm is the
/// induced infinity norm of A; A = 0 gives a constant map.
class AffineFlow : public FlowMap {
 public:
  AffineFlow(Matrix a, StateVector b);

  StateVector apply(const StateVector& x) const override { return a_ * x + b_; }
  Matrix jacobian(const StateVector&) const override { return a_; }

  double lipschitz() const { return inf_norm(a_); }

 private:
  Matrix a_;
  StateVector b_;
};

enum class LipschitzMethod {
  /// max over visited states of the induced infinity norm of the flow
  /// Jacobian; answers "how fast can nearby states separate here".
  JacobianSupremum,
  /// max of |f(a)-f(b)|_inf / |a-b|_inf over sampled perturbation pairs;
  /// answers "what separation ratios were actually observed".
  PairwiseSampling,
};

struct LipschitzEstimate {
  double value = 0.0;
  LipschitzMethod method = LipschitzMethod::JacobianSupremum;
  long sample_count = 0;
};

struct PairwiseSamplingOptions {
  int pairs_per_state = 4;
  double perturbation = 1e-3;
};

/// Empirical Lipschitz estimate along a trajectory. Both methods give an
/// along-trajectory estimate, i.e. a lower bound on any global constant.
/// PairwiseSampling needs an RngStream for the perturbations.
LipschitzEstimate estimate_lipschitz(const Trajectory& trajectory, const FlowMap& flow,
                                     LipschitzMethod method, RngStream* rng = nullptr,
                                     const PairwiseSamplingOptions& opts = {});

/// max over paired states of |f(a_k)-f(b_k)|_inf / |a_k-b_k|_inf
/// (identical pairs are skipped).
double max_secant_ratio(const Trajectory& a, const Trajectory& b, const FlowMap& flow);

}  // namespace merr
