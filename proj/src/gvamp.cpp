#include "glmamp/gvamp.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace glmamp {

GenericIterate generic_gvamp_step(const Design& design, const Vec& rTilde, const Vec& pTilde,
                                  const GvampDenoisers& den) {
  if (!design.hasFactors) throw Error(ErrorKind::Configuration, "generic GVAMP needs the stored SVD");
  GenericIterate out;
  out.r = design.apply_gram_d(den.Phi, rTilde) + design.apply_rect_t(den.PhiTilde, pTilde);
  out.p = design.apply_gram_n(den.Psi, pTilde) + design.apply_rect(den.PsiTilde, rTilde);
  out.rTilde = den.f ? den.f(out.r) : Vec::Zero(out.r.size());
  out.pTilde = den.g ? den.g(out.p) : Vec::Zero(out.p.size());
  return out;
}

LinearizedTrace linearized_gvamp(const Design& design, const Vec& gbarValues, const Vec& z, double kappa2,
                                 double nu0, double tau0, int steps, Rng& rng, const Vec* topEigenvector) {
  if (steps < 2) throw Error(ErrorKind::Configuration, "linearized GVAMP needs at least 2 steps");
  if (gbarValues.size() != design.n || z.size() != design.n)
    throw Error(ErrorKind::InvalidDimension, "linearized GVAMP: vector length differs from n");
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec n0(design.n);
  for (int i = 0; i < design.n; ++i) n0[i] = normal(rng);

  LinearizedTrace tr;
  Vec g = gbarValues.cwiseProduct(nu0 * z + tau0 * n0);
  Vec uPrev;
  double normPrev = 0.0;
  for (int t = 1; t <= steps; ++t) {
    Vec xtg = design.X.transpose() * g;
    tr.v = xtg / kappa2;
    Vec u = design.X * xtg / kappa2 - g;
    double normU = u.norm();
    if (t >= 2) {
      tr.ratio.push_back(normPrev > 0 ? normU / normPrev : 0.0);
      double denom = normU * normPrev;
      tr.cosine.push_back(denom > 0 ? u.dot(uPrev) / denom : 0.0);
    }
    if (topEigenvector) {
      double vn = tr.v.norm();
      tr.alignment.push_back(vn > 0 ? std::abs(tr.v.dot(*topEigenvector)) / vn : 0.0);
    }
    // The recursion is linear, so rescaling u keeps the ratios and directions intact.
    if (normU > 0) {
      uPrev = u / normU;
      normPrev = 1.0;
    } else {
      uPrev = u;
      normPrev = 0.0;
    }
    g = gbarValues.cwiseProduct(uPrev);
  }
  return tr;
}

SpectralInit spectral_init(const Design& design, const Vec& gbarValues, const Vec& v1, const SpectralTheory& th,
                           double rho, int sign) {
  if (!th.thresholdSatisfied || !(th.w1 > 0) || !(th.w2 > 0) || !std::isfinite(th.w1) || !std::isfinite(th.w2))
    throw Error(ErrorKind::Configuration, "spectral init requires the weak-recovery threshold to hold");
  if (sign != 1 && sign != -1) throw Error(ErrorKind::Configuration, "sign must be +1 or -1");
  SpectralInit init;
  init.s = sign;
  init.cr = std::sqrt(rho + th.w2) / th.w2;
  init.cp = std::sqrt(rho + th.w2) / (th.w1 * th.w3);
  const double sqd = std::sqrt(static_cast<double>(design.d));
  init.r0 = sign * init.cr * sqd * v1;
  Vec xv = design.X * v1;
  init.p0.resize(design.n);
  const double scale = 1e-12 * std::max(1.0, std::abs(th.gamma));
  for (int i = 0; i < design.n; ++i) {
    double diag = th.gamma + gbarValues[i];
    if (std::abs(diag) <= scale || !std::isfinite(diag))
      throw Error(ErrorKind::InitSolver, "gamma I + Gbar is singular at entry " + std::to_string(i) +
                                             " (gbar = " + std::to_string(gbarValues[i]) + ")");
    init.p0[i] = sign * init.cp * th.gamma * sqd * xv[i] / diag;
  }
  return init;
}

int oracle_sign(const Vec& v1, const Vec& beta) { return v1.dot(beta) >= 0 ? 1 : -1; }

Vec gx2(const Design& design, const Vec& r, const Vec& p, double gamma2, double tau2) {
  if (!design.hasFactors) throw Error(ErrorKind::Configuration, "g_x2 needs the stored SVD");
  const double ratio = gamma2 / tau2;
  Vec a = design.V.transpose() * r;
  Vec b = design.U.transpose() * p;
  Vec coef(design.sv.size());
  for (Eigen::Index i = 0; i < design.sv.size(); ++i) {
    double lam = design.sv[i];
    double den = ratio + lam * lam;
    if (!(den > 0))
      throw Error(ErrorKind::Divergence, "gamma2/tau2 + lambda^2 <= 0 at singular value " + std::to_string(i));
    coef[i] = lam / den * (b[i] / tau2 - lam * a[i] / gamma2);
  }
  return r / gamma2 + design.V * coef;
}

BayesGvampState bayes_gvamp_step(const Design& design, const Vec& y, const GlmModel& model,
                                 const GaussianPrior& prior, const LimitingSpectrum& law, const Vec& r,
                                 const Vec& p, double gamma1, double tau1, int t) {
  BayesGvampState st;
  st.se = se_evaluate(model, prior, law, gamma1, tau1, t);
  if (!(st.se.tau2 > 0) || !(st.se.gamma2 > 0))
    throw DivergenceError("gamma2 or tau2 left the positive domain at t = " + std::to_string(t), {st.se});
  st.r = r;
  st.p = p;
  st.x1hat.resize(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) st.x1hat[i] = prior.gx1(r[i], gamma1);
  st.z1hat.resize(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) st.z1hat[i] = model.gz1(p[i], y[i], tau1);
  st.rTilde = st.x1hat / st.se.v1 - r;
  st.pTilde = st.z1hat / st.se.c1 - p;
  st.x2hat = gx2(design, st.rTilde, st.pTilde, st.se.gamma2, st.se.tau2);
  st.z2hat = design.X * st.x2hat;
  st.rNext = st.x2hat / st.se.v2 - st.rTilde;
  st.pNext = st.z2hat / st.se.c2 - st.pTilde;
  return st;
}

GvampDenoisers bayes_denoisers(const Vec& y, const GlmModel& model, const GaussianPrior& prior,
                               const BayesSeState& se, const BayesSeState* next) {
  GvampDenoisers den;
  const double g2 = se.gamma2, t2 = se.tau2, v2 = se.v2, c2 = se.c2;
  den.Phi = [=](double x) { return 1.0 / (v2 * (g2 + t2 * x)) - 1.0; };
  den.PhiTilde = [=](double x) { return x / (v2 * (g2 + t2 * x * x)); };
  den.Psi = [=](double x) { return x / (c2 * (g2 + t2 * x)) - 1.0; };
  den.PsiTilde = [=](double x) { return x / (c2 * (g2 + t2 * x * x)); };
  if (next) {
    const BayesSeState s = *next;
    den.f = [s, prior](const Vec& r) {
      Vec out(r.size());
      for (Eigen::Index i = 0; i < r.size(); ++i) out[i] = prior.gx1(r[i], s.gamma1) / s.v1 - r[i];
      return out;
    };
    den.g = [s, model, y](const Vec& p) {
      Vec out(p.size());
      for (Eigen::Index i = 0; i < p.size(); ++i) out[i] = model.gz1(p[i], y[i], s.tau1) / s.c1 - p[i];
      return out;
    };
  }
  return den;
}

namespace {

double se_overlap(const BayesSeState& s, double rho) {
  double a = s.gamma1 * rho;
  return std::sqrt(a / (a + 1.0));
}

}  // namespace

BayesGvampRun run_bayes_gvamp(const Design& design, const Vec& y, const GlmModel& model,
                              const GaussianPrior& prior, const LimitingSpectrum& law, const SpectralTheory& th,
                              const SpectralInit& init, int maxIter, double tol, const Vec* beta) {
  if (maxIter < 1) throw Error(ErrorKind::Configuration, "maxIter must be >= 1");
  BayesGvampRun run;
  run.sign = init.s;
  Vec r = init.r0, p = init.p0;
  double gamma1 = 1.0 / th.w2;
  double tau1 = 1.0 / th.w1 + 1.0 / model.sigma2;
  std::vector<BayesSeState> scalars;
  Vec prev;
  for (int t = 0; t < maxIter; ++t) {
    if (t > 0 && se_saturated(gamma1, prior.rho)) break;
    BayesGvampState st;
    try {
      st = bayes_gvamp_step(design, y, model, prior, law, r, p, gamma1, tau1, t);
    } catch (const DivergenceError& e) {
      auto trace = scalars;
      for (const auto& s : e.trace()) trace.push_back(s);
      throw DivergenceError(e.what(), std::move(trace));
    }
    scalars.push_back(st.se);
    BayesTraceRow row;
    row.se = st.se;
    row.overlapSe = se_overlap(st.se, prior.rho);
    row.overlapEmpirical = beta ? overlap(st.x1hat, *beta) : std::numeric_limits<double>::quiet_NaN();
    run.trace.push_back(row);
    run.iterations = t + 1;
    bool stop = false;
    if (t > 0 && tol > 0) {
      double pn = prev.norm();
      stop = pn > 0 && (st.x1hat - prev).norm() / pn < tol;
    }
    prev = st.x1hat;
    run.estimate = st.x1hat;
    if (stop) break;
    r = std::move(st.rNext);
    p = std::move(st.pNext);
    gamma1 = next_gamma1(st.se);
    tau1 = next_tau1(st.se);
  }
  return run;
}

BayesGvampRun run_bayes_gvamp_auto(const Design& design, const Vec& y, const GlmModel& model,
                                   const GaussianPrior& prior, const LimitingSpectrum& law,
                                   const SpectralTheory& th, const Vec& gbarValues, const Vec& v1, int maxIter,
                                   double tol, const Vec* beta, bool useOracleSign) {
  if (useOracleSign) {
    if (!beta) throw Error(ErrorKind::Configuration, "oracle sign requested without beta*");
    auto init = spectral_init(design, gbarValues, v1, th, prior.rho, oracle_sign(v1, *beta));
    return run_bayes_gvamp(design, y, model, prior, law, th, init, maxIter, tol, beta);
  }
  const double d = static_cast<double>(design.d);
  auto mismatch = [&](const BayesGvampRun& run) {
    const auto& s = run.trace.back().se;
    return std::abs(run.estimate.squaredNorm() / d - prior.Ex(s.gamma1));
  };
  auto plus = run_bayes_gvamp(design, y, model, prior, law, th, spectral_init(design, gbarValues, v1, th, prior.rho, 1),
                              maxIter, tol, beta);
  auto minus = run_bayes_gvamp(design, y, model, prior, law, th,
                               spectral_init(design, gbarValues, v1, th, prior.rho, -1), maxIter, tol, beta);
  return mismatch(minus) < mismatch(plus) ? minus : plus;
}

DenoiserChecks denoiser_checks(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                               const BayesSeState& se) {
  DenoiserChecks c;
  c.phiTrace = law.expect_d([&](double x) { return 1.0 / (se.v2 * (se.gamma2 + se.tau2 * x)) - 1.0; });
  c.psiTrace = law.expect_n([&](double x) { return x / (se.c2 * (se.gamma2 + se.tau2 * x)) - 1.0; });
  c.fDivergence = prior.v1(se.gamma1) / se.v1 - 1.0;
  c.gDivergence = model.expected_dgz1_adaptive(se.tau1) / se.c1 - 1.0;
  return c;
}

}  // namespace glmamp
