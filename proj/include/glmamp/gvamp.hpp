#pragma once

#include "glmamp/asymptotics.hpp"
#include "glmamp/designs.hpp"
#include "glmamp/models.hpp"
#include "glmamp/spectral.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace glmamp {

struct GvampDenoisers {
  std::function<double(double)> Phi, PhiTilde, Psi, PsiTilde;
  std::function<Vec(const Vec&)> f, g;
};

struct GenericIterate {
  Vec r, p;            // r^{t+1}, p^{t+1}
  Vec rTilde, pTilde;  // f(r^{t+1}), g(p^{t+1})
};

// r = Phi(X^T X) rt + PhiTilde(X)^T pt, p = Psi(XX^T) pt + PsiTilde(X) rt.
GenericIterate generic_gvamp_step(const Design& design, const Vec& rTilde, const Vec& pTilde,
                                  const GvampDenoisers& den);

struct LinearizedTrace {
  std::vector<double> ratio;      // ||u^t|| / ||u^{t-1}||, from t = 2
  std::vector<double> cosine;     // <u^t, u^{t-1}> / (||u^t|| ||u^{t-1}||), from t = 2
  std::vector<double> alignment;  // |<v^t, v1(D)>| / ||v^t||, when v1(D) is supplied
  Vec v;                          // last v^t, rescaled
};

// u^t = (XX^T / kappa2 - I) g^t, v^t = X^T g^t / kappa2, g^{t+1} = Gbar u^t, g^1 = Gbar (nu0 z + tau0 n0).
LinearizedTrace linearized_gvamp(const Design& design, const Vec& gbarValues, const Vec& z, double kappa2,
                                 double nu0, double tau0, int steps, Rng& rng, const Vec* topEigenvector = nullptr);

struct SpectralInit {
  Vec r0, p0;
  int s = 1;
  double cr = 0, cp = 0;
};

// r0 = s cr sqrt(d) v1 and p0 = s cp gamma (gamma I + Gbar)^{-1} X sqrt(d) v1.
SpectralInit spectral_init(const Design& design, const Vec& gbarValues, const Vec& v1, const SpectralTheory& th,
                           double rho, int sign);
int oracle_sign(const Vec& v1, const Vec& beta);

struct BayesGvampState {
  BayesSeState se;
  Vec r, p;
  Vec x1hat, z1hat, rTilde, pTilde, x2hat, z2hat;
  Vec rNext, pNext;
};

// One canonical block from (r^t, p^t, gamma1^t, tau1^t). Scalars come from se_evaluate.
BayesGvampState bayes_gvamp_step(const Design& design, const Vec& y, const GlmModel& model,
                                 const GaussianPrior& prior, const LimitingSpectrum& law, const Vec& r,
                                 const Vec& p, double gamma1, double tau1, int t = 0);

// The same update written as a generic GVAMP step: matrix denoisers from se, and f, g from the
// following state when it is given.
GvampDenoisers bayes_denoisers(const Vec& y, const GlmModel& model, const GaussianPrior& prior,
                               const BayesSeState& se, const BayesSeState* next = nullptr);

// g_x2 and g_z2 through the stored SVD.
Vec gx2(const Design& design, const Vec& r, const Vec& p, double gamma2, double tau2);

struct BayesTraceRow {
  BayesSeState se;
  double overlapEmpirical = 0;  // NaN without beta*
  double overlapSe = 0;
};

struct BayesGvampRun {
  Vec estimate;
  std::vector<BayesTraceRow> trace;
  int iterations = 0;
  int sign = 1;
};

BayesGvampRun run_bayes_gvamp(const Design& design, const Vec& y, const GlmModel& model,
                              const GaussianPrior& prior, const LimitingSpectrum& law, const SpectralTheory& th,
                              const SpectralInit& init, int maxIter, double tol, const Vec* beta = nullptr);

// Runs both sign branches unless an oracle beta* fixes the sign, and keeps the branch whose
// final ||x1hat||^2 / d is closest to its state-evolution prediction.
BayesGvampRun run_bayes_gvamp_auto(const Design& design, const Vec& y, const GlmModel& model,
                                   const GaussianPrior& prior, const LimitingSpectrum& law,
                                   const SpectralTheory& th, const Vec& gbarValues, const Vec& v1, int maxIter,
                                   double tol, const Vec* beta, bool useOracleSign);

struct DenoiserChecks {
  double phiTrace = 0, psiTrace = 0;  // E_D[Phi_t], E_N[Psi_t]
  double fDivergence = 0, gDivergence = 0;
};

DenoiserChecks denoiser_checks(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                               const BayesSeState& se);

}  // namespace glmamp
