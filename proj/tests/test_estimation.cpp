#include <doctest.h>

#include <memory>
#include <random>

#include "merr/dynamics.hpp"
#include "merr/errors.hpp"
#include "merr/estimation.hpp"
#include "merr/stochastic.hpp"
#include "oracles.hpp"

using namespace merr;

TEST_SUITE("estimation") {

TEST_CASE("a free model run has identically zero residuals") {
  const Rk4Flow flow(std::make_shared<Lorenz96>(), 0.05);
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 20; ++trial) {
    Trajectory traj{oracles::random_vector(gen, 8, -4.0, 10.0)};
    for (int k = 0; k < 10; ++k) traj.push_back(flow.apply(traj.back()));

    const ErrorSequence residuals = residual_sequence(traj, flow);
    REQUIRE(residuals.size() == 10);
    for (const StateVector& r : residuals)
      for (Eigen::Index i = 0; i < r.size(); ++i) CHECK(r[i] == 0.0);
  }
}

TEST_CASE("residuals recover the errors that generated the trajectory") {
  const Rk4Flow flow(std::make_shared<Lorenz96>(), 0.05);
  std::mt19937_64 gen(67);

  Trajectory traj{oracles::random_vector(gen, 8, 2.0, 10.0)};
  ErrorSequence beta;
  for (int k = 0; k < 15; ++k) {
    beta.push_back(oracles::random_vector(gen, 8, -0.3, 0.3));
    traj.push_back(flow.apply(traj.back()) + beta.back());
  }

  const ErrorSequence recovered = residual_sequence(traj, flow);
  REQUIRE(recovered.size() == beta.size());
  for (std::size_t k = 0; k < beta.size(); ++k)
    CHECK(max_abs(StateVector(recovered[k] - beta[k])) < 1e-14);
}

TEST_CASE("residuals of a hand-built constant-tendency trajectory") {
  StateVector c(2);
  c << 4.0, 8.0;
  const Rk4Flow flow(std::make_shared<ConstantTendency>(c), 0.25);  // adds ~(1, 2)

  StateVector x0(2), x1(2), x2(2);
  x0 << 0.0, 0.0;
  x1 << 5.0, 1.0;
  x2 << 3.0, 3.0;
  const ErrorSequence r = residual_sequence({x0, x1, x2}, flow);

  REQUIRE(r.size() == 2);
  CHECK(r[0][0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r[1][0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(std::abs(r[1][1]) < 1e-12);
}

TEST_CASE("residual sequence validates trajectory length") {
  const Rk4Flow flow(std::make_shared<Lorenz96>(), 0.05);
  CHECK_THROWS_AS(residual_sequence({StateVector::Zero(6)}, flow), ValidationError);
  CHECK_THROWS_AS(residual_sequence({}, flow), ValidationError);
}

TEST_CASE("reconstructing the trajectory from residuals is exact") {
  const Rk4Flow flow(std::make_shared<Lorenz96>(), 0.05);
  std::mt19937_64 gen(71);
  Trajectory traj{oracles::random_vector(gen, 8, 2.0, 10.0)};
  for (int k = 0; k < 12; ++k)
    traj.push_back(flow.apply(traj.back()) + oracles::random_vector(gen, 8, -0.3, 0.3));

  const ErrorSequence r = residual_sequence(traj, flow);
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    const StateVector rebuilt = flow.apply(traj[k]) + r[k];
    CHECK(max_abs(StateVector(rebuilt - traj[k + 1])) < 1e-13);
  }
}

TEST_CASE("sample mean basics") {
  StateVector a(2), b(2);
  a << 1.0, 0.0;
  b << -1.0, 0.0;

  const StateVector single = sample_mean({a});
  CHECK(single[0] == 1.0);
  CHECK(single[1] == 0.0);

  const StateVector mid = sample_mean({a, b});
  CHECK(mid[0] == 0.0);
  CHECK(mid[1] == 0.0);

  CHECK_THROWS_AS(sample_mean({}), ValidationError);
}

TEST_CASE("sample mean of many prescribed-error draws obeys the CLT bound") {
  const Eigen::Index n = 40;
  const GaussianSpec spec = GaussianSpec::from_moments(build_true_mean(n),
                                                       build_true_cov(n));
  RngStream rng(7, RngUse::ModelError);
  ErrorSequence samples;
  for (int k = 0; k < 2999; ++k) samples.push_back(sample_gaussian(spec, rng));

  // 4 sigma / sqrt(tau) with sigma^2 = 0.015.
  CHECK(max_abs(StateVector(sample_mean(samples) - build_true_mean(n))) < 0.0092);
}

TEST_CASE("two-point covariance has divisor tau - 1") {
  StateVector a(2), b(2);
  a << 1.0, 0.0;
  b << -1.0, 0.0;
  const Matrix q = sample_cov({a, b});
  CHECK(q(0, 0) == 2.0);
  CHECK(q(0, 1) == 0.0);
  CHECK(q(1, 0) == 0.0);
  CHECK(q(1, 1) == 0.0);
}

TEST_CASE("a constant sequence has zero covariance") {
  StateVector c(3);
  c << 4.0, -1.0, 0.5;
  const Matrix q = sample_cov({c, c, c, c});
  CHECK(max_abs(q) == 0.0);
}

TEST_CASE("two-pass covariance equals the brute-force double loop") {
  std::mt19937_64 gen(73);
  ErrorSequence samples;
  for (int k = 0; k < 50; ++k) samples.push_back(oracles::random_vector(gen, 5, -2.0, 2.0));
  CHECK(max_abs(Matrix(sample_cov(samples) - oracles::brute_force_cov(samples))) < 1e-12);
  CHECK_THROWS_AS(sample_cov({samples[0]}), ValidationError);
}

TEST_CASE("translation shifts the mean and leaves the covariance unchanged") {
  std::mt19937_64 gen(79);
  ErrorSequence samples;
  for (int k = 0; k < 30; ++k) samples.push_back(oracles::random_vector(gen, 4, -1.0, 1.0));
  const StateVector shift = oracles::random_vector(gen, 4, -5.0, 5.0);

  ErrorSequence shifted;
  for (const StateVector& s : samples) shifted.push_back(s + shift);

  CHECK(max_abs(StateVector(sample_mean(shifted) - sample_mean(samples) - shift)) < 1e-12);
  CHECK(max_abs(Matrix(sample_cov(shifted) - sample_cov(samples))) < 1e-12);
}

TEST_CASE("moment error report identities") {
  const Eigen::Index n = 6;
  std::mt19937_64 gen(83);

  SUBCASE("all three means equal gives zero mean errors") {
    const StateVector mu = oracles::random_vector(gen, n, -1.0, 1.0);
    const Matrix q1 = oracles::random_spd(gen, n);
    const Matrix q2 = oracles::random_spd(gen, n);
    const MomentEstimate sampled{mu, q1, 10};
    const MomentEstimate estimated{mu, q2, 10};
    const MomentErrorReport r = moment_error_report(sampled, estimated, mu, q1);
    CHECK(r.max_mean_sampled_vs_prescribed == 0.0);
    CHECK(r.max_mean_sampled_vs_estimated == 0.0);
    CHECK(r.max_mean_prescribed_vs_estimated == 0.0);
  }

  SUBCASE("estimated covariance equal to prescribed collapses one difference") {
    const StateVector mu = oracles::random_vector(gen, n, -1.0, 1.0);
    const Matrix q = oracles::random_spd(gen, n);
    const Matrix q_bar = oracles::random_spd(gen, n);
    const MomentEstimate sampled{mu, q, 10};
    const MomentEstimate estimated{mu, q_bar, 10};  // Q~ = Q_bar
    const MomentErrorReport r = moment_error_report(sampled, estimated, mu, q_bar);
    CHECK(max_abs(r.cov_prescribed_vs_estimated) == 0.0);
    CHECK(max_abs(Matrix(r.cov_sampled_vs_estimated - r.cov_sampled_vs_prescribed)) == 0.0);
  }
}

}  // TEST_SUITE
