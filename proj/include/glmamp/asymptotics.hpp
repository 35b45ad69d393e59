#pragma once

#include "glmamp/designs.hpp"
#include "glmamp/models.hpp"

#include <array>
#include <vector>

namespace glmamp {

struct BayesSeState {
  int t = 0;
  double gamma1 = 0, tau1 = 0, gamma2 = 0, tau2 = 0;
  double v1 = 0, c1 = 0, v2 = 0, c2 = 0;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<BayesSeState> trace)
      : Error(ErrorKind::Divergence, what), trace_(std::move(trace)) {}
  const std::vector<BayesSeState>& trace() const { return trace_; }

 private:
  std::vector<BayesSeState> trace_;
};

// One pass of the scalar recursion from (gamma1, tau1); the returned state carries everything
// computed at step t. gamma1/tau1 of step t + 1 are next_gamma1/next_tau1.
BayesSeState se_evaluate(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                         double gamma1, double tau1, int t = 0);
double next_gamma1(const BayesSeState& s);
double next_tau1(const BayesSeState& s);

std::vector<BayesSeState> se_recursion(const GlmModel& model, const GaussianPrior& prior,
                                       const LimitingSpectrum& law, double gamma1, double tau1, int steps);

// Past this value of gamma1 rho the posterior variance is at machine precision and 1/v1 - gamma1
// cancels; the recursion is treated as having reached exact recovery.
constexpr double kSeSaturation = 1e13;
inline bool se_saturated(double gamma1, double rho) { return gamma1 * rho > kSeSaturation; }

struct SeFixedPoint {
  BayesSeState state;
  int iterations = 0;
  bool inDomain = false;
  bool saturated = false;  // gamma1 ran off to infinity (overlap 1)
  double residual = 0;  // max abs residual of the eight fixed-point equations
};

SeFixedPoint se_fixed_point(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                            double gamma1, double tau1, double tol = 1e-10, int maxSteps = 10000);

std::array<double, 8> se_residuals(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                                   const BayesSeState& s);

struct ReplicaSolution {
  double qx = 0, qz = 0, qxHat = 0, qzHat = 0, gammaX = 0, gammaZ = 0;
  double Qz = 0, QzHat = 0;
  double overlapPredicted = 0;
  std::array<double, 6> residuals{};
};

// Change of variables from an SE fixed point and direct evaluation of the six saddle-point equations.
ReplicaSolution replica_from_se(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                                const BayesSeState& s, double tol = 1e-8);
BayesSeState se_from_replica(const GlmModel& model, const GaussianPrior& prior, const ReplicaSolution& r);
std::array<double, 6> replica_residuals(const GlmModel& model, const GaussianPrior& prior,
                                        const LimitingSpectrum& law, const ReplicaSolution& r);

// E[(tau2 Lambda_d^2 + gamma2)^{-1}].
double S_function(double tau2, double gamma2, const LimitingSpectrum& law);

struct FValue {
  double v = 0, F = 0, tau1 = 0, gamma1 = 0;
  bool defined = false;
};

// v -> F(v) with gamma1 = (rho - v) / (rho v) and tau1(v) from v = S(tau2(tau1), 1 / rho).
FValue replica_F(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law, double v);
FValue phase_retrieval_F(double v, const LimitingSpectrum& law, double rho, double sigma2, int quadratureDegree = 50);

struct FScan {
  std::vector<FValue> grid;
  std::vector<FValue> fixedPoints;
};

FScan scan_F_fixed_points(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                          int gridPoints = 2000);

}  // namespace glmamp
