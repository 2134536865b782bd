#include "merr/stochastic.hpp"

#include <cmath>

#include "merr/errors.hpp"

namespace merr {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// Per-stream salts (hex digits of pi, as in counter-based generators).
constexpr std::uint64_t kStreamSalt[] = {
    0x243F6A8885A308D3ULL,  // model error
    0x13198A2E03707344ULL,  // observation noise
    0xA4093822299F31D0ULL,  // init
};

// splitmix64 output mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, RngUse use, std::uint64_t counter)
    : seed_(seed), use_(use), counter_(counter) {
  base_ = mix64(mix64(seed + kGamma) ^ kStreamSalt[static_cast<std::uint64_t>(use)]);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix64(base_ + counter_ * kGamma);
}

double RngStream::next_uniform() {
  // 53 random bits; map to (0, 1] so log() in Box-Muller is always finite.
  return 1.0 - static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

StateVector RngStream::normal_vector(Eigen::Index n) {
  StateVector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = next_normal();
  return z;
}

StateVector build_true_mean(Eigen::Index n) {
  if (n < 1) throw ValidationError("build_true_mean: n must be >= 1");
  StateVector mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu[i] = 0.2 * std::sin(M_PI * static_cast<double>(i + 1) / static_cast<double>(n));
  }
  return mu;
}

Matrix build_true_cov(Eigen::Index n, bool cyclic) {
  if (n < 5) throw ValidationError("build_true_cov: n must be >= 5");
  Matrix q = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::Index d = i > j ? i - j : j - i;
      if (cyclic) d = std::min(d, n - d);
      double c = 0.0;
      if (d == 0) c = 1.0;
      else if (d == 1) c = 2.0 / 3.0;
      else if (d == 2) c = 1.0 / 6.0;
      q(i, j) = 0.015 * c;
    }
  }
  return q;
}

void validate_covariance(const Matrix& q) {
  if (q.rows() != q.cols()) throw ValidationError("covariance: not square");
  if (!all_finite(q)) throw ValidationError("covariance: non-finite entries");
  if (q.size() > 0 && max_abs(Matrix(q - q.transpose())) > 1e-12)
    throw ValidationError("covariance: not symmetric to 1e-12");
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    if (q(i, i) < 0.0) throw ValidationError("covariance: negative diagonal entry");
  }
}

Matrix symmetric_sqrt(const Matrix& q) {
  validate_covariance(q);
  const Matrix sym = 0.5 * (q + q.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success)
    throw NotPsdError("symmetric_sqrt: eigendecomposition failed");

  StateVector lambda = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -1e-10) {
      throw NotPsdError("symmetric_sqrt: eigenvalue " + std::to_string(lambda[i]) +
                        " below -1e-10");
    }
    lambda[i] = lambda[i] > 0.0 ? std::sqrt(lambda[i]) : 0.0;
  }

  Matrix s = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (s + s.transpose());
}

GaussianSpec GaussianSpec::from_moments(const StateVector& mean, const Matrix& cov) {
  if (mean.size() != cov.rows())
    throw ValidationError("GaussianSpec: mean/cov dimension mismatch");
  GaussianSpec spec{mean, symmetric_sqrt(cov)};
  const double err = max_abs(Matrix(spec.sqrt_cov * spec.sqrt_cov.transpose() - cov));
  if (err > 1e-10)
    throw NotPsdError("GaussianSpec: square-root reconstruction error " +
                      std::to_string(err));
  return spec;
}

StateVector sample_gaussian(const GaussianSpec& spec, RngStream& rng) {
  if (spec.mean.size() != spec.sqrt_cov.rows() ||
      spec.sqrt_cov.rows() != spec.sqrt_cov.cols())
    throw ValidationError("sample_gaussian: inconsistent spec dimensions");
  return spec.mean + spec.sqrt_cov * rng.normal_vector(spec.mean.size());
}

}  // namespace merr
