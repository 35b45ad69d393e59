#include "glmamp/asymptotics.hpp"

#include "glmamp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace glmamp {

namespace {

std::string describe(const BayesSeState& s) {
  std::ostringstream os;
  os.precision(10);
  os << "t=" << s.t << " gamma1=" << s.gamma1 << " tau1=" << s.tau1 << " gamma2=" << s.gamma2
     << " tau2=" << s.tau2 << " v1=" << s.v1 << " c1=" << s.c1 << " v2=" << s.v2 << " c2=" << s.c2;
  return os.str();
}

bool in_domain(const BayesSeState& s, double rho, double sigma2) {
  const double eps = 1e-9;
  return s.gamma1 >= -eps && s.tau1 >= 1 / sigma2 - eps && s.gamma2 >= 1 / rho - eps && s.tau2 >= -eps &&
         s.v1 >= -eps && s.v1 <= rho + eps && s.v2 >= -eps && s.v2 <= rho + eps && s.c1 >= -eps &&
         s.c1 <= sigma2 + eps && s.c2 >= -eps && s.c2 <= sigma2 + eps;
}

}  // namespace

double S_function(double tau2, double gamma2, const LimitingSpectrum& law) {
  if (gamma2 == 0 && (law.massD < 1.0 || tau2 == 0))
    throw Error(ErrorKind::SingularExpectation, "gamma2 = 0 with an atom of Lambda_d^2 at zero");
  return law.expect_d([&](double x) { return 1.0 / (tau2 * x + gamma2); });
}

BayesSeState se_evaluate(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                         double gamma1, double tau1, int t) {
  BayesSeState s;
  s.t = t;
  s.gamma1 = gamma1;
  s.tau1 = tau1;
  s.v1 = prior.v1(gamma1);
  s.c1 = model.c1(tau1);
  s.gamma2 = 1.0 / s.v1 - gamma1;
  s.tau2 = 1.0 / s.c1 - tau1;
  if (!(s.gamma2 > 0) || !(s.tau2 >= 0) || !std::isfinite(s.gamma2) || !std::isfinite(s.tau2))
    throw DivergenceError("state evolution left its domain: " + describe(s), {s});
  s.v2 = law.expect_d([&](double x) { return 1.0 / (s.tau2 * x + s.gamma2); });
  s.c2 = law.expect_n([&](double x) { return x / (s.tau2 * x + s.gamma2); });
  return s;
}

double next_gamma1(const BayesSeState& s) { return 1.0 / s.v2 - s.gamma2; }
double next_tau1(const BayesSeState& s) { return 1.0 / s.c2 - s.tau2; }

std::vector<BayesSeState> se_recursion(const GlmModel& model, const GaussianPrior& prior,
                                       const LimitingSpectrum& law, double gamma1, double tau1, int steps) {
  if (gamma1 < 0 || tau1 < 1 / model.sigma2 - 1e-12)
    throw Error(ErrorKind::Domain, "initial state needs gamma1 >= 0 and tau1 >= 1/sigma2");
  std::vector<BayesSeState> trace;
  for (int t = 0; t < steps; ++t) {
    try {
      trace.push_back(se_evaluate(model, prior, law, gamma1, tau1, t));
    } catch (const DivergenceError& e) {
      auto full = trace;
      full.insert(full.end(), e.trace().begin(), e.trace().end());
      throw DivergenceError(e.what(), full);
    }
    gamma1 = next_gamma1(trace.back());
    tau1 = next_tau1(trace.back());
  }
  return trace;
}

std::array<double, 8> se_residuals(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                                   const BayesSeState& s) {
  std::array<double, 8> r{};
  r[0] = s.v1 - prior.v1(s.gamma1);
  r[1] = s.c1 - model.c1(s.tau1);
  r[2] = s.gamma2 - (1 / s.v1 - s.gamma1);
  r[3] = s.tau2 - (1 / s.c1 - s.tau1);
  r[4] = s.v2 - law.expect_d([&](double x) { return 1.0 / (s.tau2 * x + s.gamma2); });
  r[5] = s.c2 - law.expect_n([&](double x) { return x / (s.tau2 * x + s.gamma2); });
  r[6] = s.gamma1 - (1 / s.v2 - s.gamma2);
  r[7] = s.tau1 - (1 / s.c2 - s.tau2);
  return r;
}

SeFixedPoint se_fixed_point(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                            double gamma1, double tau1, double tol, int maxSteps) {
  std::vector<BayesSeState> recent;
  for (int t = 0; t < maxSteps; ++t) {
    if (!recent.empty() && se_saturated(gamma1, prior.rho)) {
      SeFixedPoint fp;
      fp.state = recent.back();
      fp.iterations = t;
      fp.inDomain = true;
      fp.saturated = true;
      fp.residual = std::numeric_limits<double>::quiet_NaN();
      return fp;
    }
    BayesSeState s = se_evaluate(model, prior, law, gamma1, tau1, t);
    recent.push_back(s);
    if (recent.size() > 10) recent.erase(recent.begin());
    double g = next_gamma1(s), h = next_tau1(s);
    double change = std::max(std::abs(g - gamma1) / std::max(std::abs(gamma1), 1e-300),
                             std::abs(h - tau1) / std::max(std::abs(tau1), 1e-300));
    if (gamma1 == 0 && g == 0) change = std::abs(h - tau1) / std::abs(tau1);
    gamma1 = g;
    tau1 = h;
    if (change < tol) {
      SeFixedPoint fp;
      fp.state = se_evaluate(model, prior, law, gamma1, tau1, t + 1);
      fp.iterations = t + 1;
      fp.inDomain = in_domain(fp.state, prior.rho, model.sigma2);
      auto res = se_residuals(model, prior, law, fp.state);
      for (double v : res) fp.residual = std::max(fp.residual, std::abs(v));
      return fp;
    }
  }
  std::ostringstream os;
  os << "state evolution did not converge in " << maxSteps << " steps; last states:";
  for (const auto& s : recent) os << "\n  " << describe(s);
  throw Error(ErrorKind::NonConvergence, os.str());
}

std::array<double, 6> replica_residuals(const GlmModel& model, const GaussianPrior& prior,
                                        const LimitingSpectrum& law, const ReplicaSolution& r) {
  const double rho = prior.rho;
  std::array<double, 6> res{};
  res[0] = r.qx - prior.Ex(r.qxHat);
  res[1] = r.qz - model.Ez(r.qzHat + 1.0 / model.sigma2);
  res[2] = r.qxHat - (r.qx / (rho * (rho - r.qx)) - r.gammaX);
  res[3] = r.qzHat - (r.qz / (r.Qz * (r.Qz - r.qz)) - r.gammaZ);
  res[4] = (rho - r.qx) - law.expect_d([&](double x) { return 1.0 / (1 / rho + r.gammaX + r.gammaZ * x); });
  res[5] = (r.Qz - r.qz) - law.expect_n([&](double x) { return x / (1 / rho + r.gammaX + r.gammaZ * x); });
  return res;
}

ReplicaSolution replica_from_se(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                                const BayesSeState& s, double tol) {
  const double rho = prior.rho, sigma2 = model.sigma2;
  ReplicaSolution r;
  r.qxHat = s.gamma1;
  r.qzHat = s.tau1 - 1.0 / sigma2;
  r.gammaX = s.gamma2 - 1.0 / rho;
  r.gammaZ = s.tau2;
  r.qx = rho - s.v1;
  r.qz = sigma2 - s.c1;
  r.Qz = rho * law.expect_d([](double x) { return x; }) / law.delta;
  r.QzHat = 1.0 / r.Qz;
  r.overlapPredicted = std::sqrt(std::max(0.0, r.qx / rho));
  r.residuals = replica_residuals(model, prior, law, r);
  double worst = 0;
  for (double v : r.residuals) worst = std::max(worst, std::abs(v));
  if (!(worst <= tol)) {
    std::ostringstream os;
    os << "replica residual " << worst << " exceeds " << tol << " at " << describe(s);
    throw Error(ErrorKind::EquivalenceViolation, os.str());
  }
  return r;
}

BayesSeState se_from_replica(const GlmModel& model, const GaussianPrior& prior, const ReplicaSolution& r) {
  BayesSeState s;
  s.gamma1 = r.qxHat;
  s.tau1 = r.qzHat + 1.0 / model.sigma2;
  s.gamma2 = r.gammaX + 1.0 / prior.rho;
  s.tau2 = r.gammaZ;
  s.v1 = s.v2 = prior.rho - r.qx;
  s.c1 = s.c2 = model.sigma2 - r.qz;
  return s;
}

FValue replica_F(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law, double v) {
  const double rho = prior.rho, delta = law.delta;
  if (!(v > 0 && v < rho)) throw Error(ErrorKind::Domain, "v must lie in (0, rho)");
  FValue out;
  out.v = v;
  out.gamma1 = (rho - v) / (rho * v);
  const double den = rho * delta - (rho - v);
  if (!(den > 0)) return out;
  const double slope = (rho - v) / den;
  auto g = [&](double tau1) { return S_function(slope * tau1, 1.0 / rho, law) - v; };
  double lo = 1.0 / model.sigma2;
  if (g(lo) < 0) return out;
  double hi = 1e6;
  while (g(hi) > 0) {
    lo = hi;
    hi *= 10;
    if (hi > 1e14) return out;
  }
  out.tau1 = find_root(g, lo, hi, 1e-14 * hi, 2000);
  out.F = delta * rho * v / (rho - v) * (1 - out.tau1 * model.c1(out.tau1));
  out.defined = true;
  return out;
}

FValue phase_retrieval_F(double v, const LimitingSpectrum& law, double rho, double sigma2, int quadratureDegree) {
  GlmModel m = GlmModel::from_name("phase-retrieval", sigma2, quadratureDegree);
  return replica_F(m, GaussianPrior(rho), law, v);
}

FScan scan_F_fixed_points(const GlmModel& model, const GaussianPrior& prior, const LimitingSpectrum& law,
                          int gridPoints) {
  if (gridPoints < 3) throw Error(ErrorKind::Configuration, "grid needs at least 3 points");
  const double rho = prior.rho;
  FScan scan;
  scan.grid.reserve(gridPoints);
  for (int k = 1; k <= gridPoints; ++k)
    scan.grid.push_back(replica_F(model, prior, law, rho * k / (gridPoints + 1.0)));
  for (int k = 0; k + 1 < gridPoints; ++k) {
    const FValue &a = scan.grid[k], &b = scan.grid[k + 1];
    if (!a.defined || !b.defined) continue;
    double fa = a.F - a.v, fb = b.F - b.v;
    if (fa == 0) {
      scan.fixedPoints.push_back(a);
      continue;
    }
    if ((fa > 0) == (fb > 0)) continue;
    auto h = [&](double v) {
      FValue f = replica_F(model, prior, law, v);
      return f.defined ? f.F - v : std::numeric_limits<double>::quiet_NaN();
    };
    double root = find_root(h, a.v, b.v, 1e-14, 500);
    scan.fixedPoints.push_back(replica_F(model, prior, law, root));
  }
  return scan;
}

}  // namespace glmamp
