#pragma once

#include <stdexcept>
#include <string>

namespace merr {

/// Rejected input: violated precondition or malformed argument.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values produced while advancing the model.
class IntegrationFailure : public std::runtime_error {
 public:
  explicit IntegrationFailure(const std::string& msg, long step = -1)
      : std::runtime_error(step >= 0 ? msg + " at step " + std::to_string(step)
                                     : msg),
        step_(step) {}

  long step() const noexcept { return step_; }

 private:
  long step_ = -1;
};

/// Matrix required to be positive semi-definite is not.
class NotPsdError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// HBH^T + R is singular or numerically unusable in the analysis update.
class IllPosedAnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Config file could not be parsed; carries the 1-based line number.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(const std::string& msg, long line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_(line) {}

  long line() const noexcept { return line_; }

 private:
  long line_;
};

/// Filesystem failure; the message names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace merr
