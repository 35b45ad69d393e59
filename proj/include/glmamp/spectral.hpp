#pragma once

#include "glmamp/cumulants.hpp"
#include "glmamp/designs.hpp"
#include "glmamp/models.hpp"
#include "glmamp/numerics.hpp"

#include <optional>

namespace glmamp {

enum class PreprocessVariant { Optimal, Conjectured };

struct Preprocess {
  GbarMoments gbarMoments;
  double gamma = 1.0;
  PreprocessVariant variant = PreprocessVariant::Optimal;

  // Denominator shift: gamma for the optimal variant, 1 for the conjectured one.
  double shift() const { return variant == PreprocessVariant::Optimal ? gamma : 1.0; }
  double apply(double gbarValue) const { return gbarValue / (gbarValue + shift()); }
};

double compute_gamma(const CumulantSet& cumulants, double delta, const GbarMoments& g);
Preprocess optimal_preprocess(const GlmModel& model, const CumulantSet& cumulants, double delta);
Preprocess conjectured_preprocess(const GlmModel& model);

struct ThresholdResult {
  bool satisfied = false;
  double deltaStar = 0.0;  // NaN when the spectrum does not scale with delta
};

// Weak-recovery condition at the law's own delta; deltaStar solves the equality case in delta.
ThresholdResult threshold_check(const SpectralLaw& law, const GbarMoments& g);
bool threshold_holds(const CumulantSet& cumulants, double delta, const GbarMoments& g);

struct SpectralTheory {
  double gamma = 0;
  double w1 = 0, w2 = 0, w3 = 0, w4 = 0;
  double eta = 0;
  double lambda1Limit = 0;
  double lambdaCirc = 0, aCirc = 0;
  bool thresholdSatisfied = false;
  bool etaDefined = false;
  bool edgeDefined = false;
  double deltaStar = 0;
};

SpectralTheory spectral_theory(const CumulantSet& cumulants, double delta, const GbarMoments& g, double rho);

struct SpectralResult {
  double lambda1 = 0, lambda2 = 0;
  Vec v1;
  double overlap = 0;  // filled by the caller when beta* is known
};

// Top two eigenpairs of D = X^T diag(t) X. v1 has its first nonzero coordinate positive.
SpectralResult build_D(const Design& design, const Vec& t);
SpectralResult build_D(const Design& design, const Vec& y, const GlmModel& model, const Preprocess& pre);
Vec preprocess_responses(const Vec& y, const GlmModel& model, const Preprocess& pre);

double overlap(const Vec& estimate, const Vec& truth);

// Law of T = gbar(Y) / (gbar(Y) + shift) under the model, as a probability rule.
Rule limiting_T_law(const GlmModel& model, double shift, int nodes = 400);
Rule empirical_law(const std::vector<double>& samples);
Rule empirical_law(const Vec& samples);

struct EdgeResult {
  double aCirc = 0;
  double lambdaCirc = 0;
};

// psi and its critical points for S ~ law(Lambda_n^2) and T ~ lawT.
class BulkEdge {
 public:
  BulkEdge(const LimitingSpectrum& lawS, Rule lawT);

  double sup_T() const { return supT_; }
  std::optional<double> omega(double a) const;
  double psi(double a) const;
  double psi_prime(double a) const;
  // Largest critical point of psi on (sup T, hi], widening hi up to cap.
  EdgeResult solve(double hi = 50.0, double cap = 1e4, int gridPoints = 4000) const;

 private:
  struct Moments {
    double s1, s0, s2, s00;
  };
  Moments s_moments(double w) const;
  double expect_T(double a, int power, bool numeratorT) const;

  LimitingSpectrum S_;
  Rule T_;
  double supT_;
  double meanS_;
};

}  // namespace glmamp
