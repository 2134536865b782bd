#include "merr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "merr/errors.hpp"

namespace merr {

namespace {

void require_finite(const StateVector& x, const char* who) {
  if (!all_finite(x)) throw ValidationError(std::string(who) + ": non-finite input state");
}

}  // namespace

StateVector Lorenz96::tendency(const StateVector& x) const {
  const Eigen::Index n = x.size();
  if (n < 4) throw ValidationError("lorenz96: state dimension must be >= 4");
  require_finite(x, "lorenz96");

  StateVector dx(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index im2 = (i - 2 + n) % n;
    const Eigen::Index im1 = (i - 1 + n) % n;
    const Eigen::Index ip1 = (i + 1) % n;
    dx[i] = -x[im2] * x[im1] + x[im1] * x[ip1] - x[i] + forcing_;
  }
  return dx;
}

Matrix Lorenz96::tendency_jacobian(const StateVector& x) const {
  const Eigen::Index n = x.size();
  if (n < 4) throw ValidationError("lorenz96: state dimension must be >= 4");
  require_finite(x, "lorenz96");

  Matrix j = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index im2 = (i - 2 + n) % n;
    const Eigen::Index im1 = (i - 1 + n) % n;
    const Eigen::Index ip1 = (i + 1) % n;
    j(i, im2) += -x[im1];
    j(i, im1) += x[ip1] - x[im2];
    j(i, ip1) += x[im1];
    j(i, i) += -1.0;
  }
  return j;
}

StateVector Lorenz96::equilibrium(Eigen::Index n) const {
  return StateVector::Constant(n, forcing_);
}

StateVector lorenz96_tendency(const StateVector& x, double forcing) {
  return Lorenz96(forcing).tendency(x);
}

StateVector rk4_step(const TendencyModel& model, const StateVector& x, double dt) {
  require_finite(x, "rk4_step");
  if (!std::isfinite(dt) || dt < 0.0) throw ValidationError("rk4_step: dt must be finite and >= 0");
  if (dt == 0.0) return x;

  const StateVector k1 = model.tendency(x);
  if (!all_finite(k1)) throw IntegrationFailure("rk4_step: non-finite stage 1");
  const StateVector k2 = model.tendency(x + (0.5 * dt) * k1);
  if (!all_finite(k2)) throw IntegrationFailure("rk4_step: non-finite stage 2");
  const StateVector k3 = model.tendency(x + (0.5 * dt) * k2);
  if (!all_finite(k3)) throw IntegrationFailure("rk4_step: non-finite stage 3");
  const StateVector k4 = model.tendency(x + dt * k3);
  if (!all_finite(k4)) throw IntegrationFailure("rk4_step: non-finite stage 4");

  StateVector out = x + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);
  if (!all_finite(out)) throw IntegrationFailure("rk4_step: non-finite result");
  return out;
}

Matrix rk4_flow_jacobian(const TendencyModel& model, const StateVector& x, double dt) {
  require_finite(x, "rk4_flow_jacobian");
  if (!std::isfinite(dt) || dt < 0.0)
    throw ValidationError("rk4_flow_jacobian: dt must be finite and >= 0");
  const Eigen::Index n = x.size();
  const Matrix id = Matrix::Identity(n, n);
  if (dt == 0.0) return id;

  const StateVector k1 = model.tendency(x);
  const StateVector s2 = x + (0.5 * dt) * k1;
  const StateVector k2 = model.tendency(s2);
  const StateVector s3 = x + (0.5 * dt) * k2;
  const StateVector k3 = model.tendency(s3);
  const StateVector s4 = x + dt * k3;

  // dk_m/dx, propagating the stage dependencies.
  const Matrix d1 = model.tendency_jacobian(x);
  const Matrix d2 = model.tendency_jacobian(s2) * (id + (0.5 * dt) * d1);
  const Matrix d3 = model.tendency_jacobian(s3) * (id + (0.5 * dt) * d2);
  const Matrix d4 = model.tendency_jacobian(s4) * (id + dt * d3);

  return id + (dt / 6.0) * (d1 + 2.0 * (d2 + d3) + d4);
}

Rk4Flow::Rk4Flow(std::shared_ptr<const TendencyModel> model, double dt)
    : model_(std::move(model)), dt_(dt) {
  if (!model_) throw ValidationError("Rk4Flow: null tendency model");
  if (!std::isfinite(dt_) || dt_ < 0.0) throw ValidationError("Rk4Flow: dt must be finite and >= 0");
}

StateVector Rk4Flow::apply(const StateVector& x) const { return rk4_step(*model_, x, dt_); }

Matrix Rk4Flow::jacobian(const StateVector& x) const {
  return rk4_flow_jacobian(*model_, x, dt_);
}

AffineFlow::AffineFlow(Matrix a, StateVector b) : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != a_.cols() || a_.rows() != b_.size())
    throw ValidationError("AffineFlow: inconsistent dimensions");
}

LipschitzEstimate estimate_lipschitz(const Trajectory& trajectory, const FlowMap& flow,
                                     LipschitzMethod method, RngStream* rng,
                                     const PairwiseSamplingOptions& opts) {
  if (trajectory.size() < 2)
    throw ValidationError("estimate_lipschitz: trajectory needs at least 2 states");

  LipschitzEstimate est;
  est.method = method;

  if (method == LipschitzMethod::JacobianSupremum) {
    for (const StateVector& s : trajectory) {
      est.value = std::max(est.value, inf_norm(flow.jacobian(s)));
      ++est.sample_count;
    }
    return est;
  }

  if (rng == nullptr)
    throw ValidationError("estimate_lipschitz: pairwise sampling needs an RngStream");
  if (opts.pairs_per_state < 1 || !(opts.perturbation > 0.0))
    throw ValidationError("estimate_lipschitz: invalid sampling options");

  for (const StateVector& s : trajectory) {
    const StateVector fs = flow.apply(s);
    for (int p = 0; p < opts.pairs_per_state; ++p) {
      const StateVector b = s + opts.perturbation * rng->normal_vector(s.size());
      const double denom = max_abs(StateVector(s - b));
      if (denom == 0.0) continue;
      est.value = std::max(est.value, max_abs(StateVector(fs - flow.apply(b))) / denom);
      ++est.sample_count;
    }
  }
  return est;
}

double max_secant_ratio(const Trajectory& a, const Trajectory& b, const FlowMap& flow) {
  if (a.size() != b.size()) throw ValidationError("max_secant_ratio: misaligned trajectories");
  double ratio = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double denom = max_abs(StateVector(a[k] - b[k]));
    if (denom == 0.0) continue;
    ratio = std::max(ratio, max_abs(StateVector(flow.apply(a[k]) - flow.apply(b[k]))) / denom);
  }
  return ratio;
}

}  // namespace merr
