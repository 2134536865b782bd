#include "merr/estimation.hpp"

#include "merr/errors.hpp"

namespace merr {

namespace {

void require_uniform_dimension(const ErrorSequence& seq, const char* who) {
  for (const StateVector& s : seq) {
    if (s.size() != seq.front().size())
      throw ValidationError(std::string(who) + ": samples of mixed dimension");
  }
}

}  // namespace

ErrorSequence residual_sequence(const Trajectory& analysis, const FlowMap& model) {
  if (analysis.size() < 2)
    throw ValidationError("residual_sequence: trajectory needs at least 2 states");

  ErrorSequence residuals;
  residuals.reserve(analysis.size() - 1);
  for (std::size_t k = 0; k + 1 < analysis.size(); ++k) {
    if (analysis[k].size() != analysis[k + 1].size())
      throw ValidationError("residual_sequence: states of mixed dimension");
    residuals.push_back(analysis[k + 1] - model.apply(analysis[k]));
  }
  return residuals;
}

StateVector sample_mean(const ErrorSequence& seq) {
  if (seq.empty()) throw ValidationError("sample_mean: empty sequence");
  require_uniform_dimension(seq, "sample_mean");

  StateVector sum = StateVector::Zero(seq.front().size());
  for (const StateVector& s : seq) sum += s;
  return sum / static_cast<double>(seq.size());
}

Matrix sample_cov(const ErrorSequence& seq) {
  if (seq.size() < 2) throw ValidationError("sample_cov: need at least 2 samples");
  require_uniform_dimension(seq, "sample_cov");

  const StateVector mu = sample_mean(seq);
  Matrix cov = Matrix::Zero(mu.size(), mu.size());
  for (const StateVector& s : seq) {
    const StateVector d = s - mu;
    cov += d * d.transpose();
  }
  return cov / static_cast<double>(seq.size() - 1);
}

MomentEstimate estimate_moments(const ErrorSequence& seq) {
  return MomentEstimate{sample_mean(seq), sample_cov(seq),
                        static_cast<long>(seq.size())};
}

MomentErrorReport moment_error_report(const MomentEstimate& sampled,
                                      const MomentEstimate& estimated,
                                      const StateVector& prescribed_mean,
                                      const Matrix& prescribed_cov) {
  if (sampled.mean.size() != estimated.mean.size() ||
      sampled.mean.size() != prescribed_mean.size() ||
      sampled.cov.rows() != prescribed_cov.rows() ||
      estimated.cov.rows() != prescribed_cov.rows())
    throw ValidationError("moment_error_report: inconsistent dimensions");

  MomentErrorReport r;
  r.mean_sampled_vs_prescribed = (sampled.mean - prescribed_mean).cwiseAbs();
  r.mean_sampled_vs_estimated = (sampled.mean - estimated.mean).cwiseAbs();
  r.mean_prescribed_vs_estimated = (prescribed_mean - estimated.mean).cwiseAbs();
  r.cov_sampled_vs_prescribed = (sampled.cov - prescribed_cov).cwiseAbs();
  r.cov_sampled_vs_estimated = (sampled.cov - estimated.cov).cwiseAbs();
  r.cov_prescribed_vs_estimated = (prescribed_cov - estimated.cov).cwiseAbs();

  r.max_mean_sampled_vs_prescribed = max_abs(r.mean_sampled_vs_prescribed);
  r.max_mean_sampled_vs_estimated = max_abs(r.mean_sampled_vs_estimated);
  r.max_mean_prescribed_vs_estimated = max_abs(r.mean_prescribed_vs_estimated);
  r.max_cov_sampled_vs_prescribed = max_abs(r.cov_sampled_vs_prescribed);
  r.max_cov_sampled_vs_estimated = max_abs(r.cov_sampled_vs_estimated);
  r.max_cov_prescribed_vs_estimated = max_abs(r.cov_prescribed_vs_estimated);
  return r;
}

}  // namespace merr
