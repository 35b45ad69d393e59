#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace glmamp {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidDimension,
  Configuration,
  DegenerateRatio,
  Domain,
  Divergence,
  EdgeSolver,
  EquivalenceViolation,
  SignConvention,
  InitSolver,
  PreprocessDomain,
  SingularExpectation,
  NonConvergence,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace glmamp
