#include "glmamp/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace glmamp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double threshold_margin(const CumulantSet& c, const GbarMoments& g) {
  return c.excess() * g.z2 * g.z2 - g.sq;
}

}  // namespace

double compute_gamma(const CumulantSet& cumulants, double delta, const GbarMoments& g) {
  if (!(cumulants.k2 > 0)) throw Error(ErrorKind::Domain, "kappa_2 must be positive");
  if (!(g.z2 > 0)) throw Error(ErrorKind::SignConvention, "E[gbar(Y) Zbar^2] must be positive");
  return (cumulants.k4 / (cumulants.k2 * cumulants.k2) + delta) * g.z2;
}

Preprocess optimal_preprocess(const GlmModel& model, const CumulantSet& cumulants, double delta) {
  Preprocess p;
  p.gbarMoments = model.gbar_moments();
  p.gamma = compute_gamma(cumulants, delta, p.gbarMoments);
  p.variant = PreprocessVariant::Optimal;
  return p;
}

Preprocess conjectured_preprocess(const GlmModel& model) {
  Preprocess p;
  p.gbarMoments = model.gbar_moments();
  p.gamma = 1.0;
  p.variant = PreprocessVariant::Conjectured;
  return p;
}

bool threshold_holds(const CumulantSet& cumulants, double delta, const GbarMoments& g) {
  CumulantSet c = cumulants;
  c.deltaHat = delta;
  return threshold_margin(c, g) > 0;
}

ThresholdResult threshold_check(const SpectralLaw& law, const GbarMoments& g) {
  ThresholdResult r;
  r.satisfied = threshold_margin(limiting_cumulants(law), g) > 0;
  if (law.kind == LawKind::Empirical) {
    r.deltaStar = kNaN;
    return r;
  }
  auto margin = [&](double delta) {
    SpectralLaw l = law;
    l.delta = delta;
    return threshold_margin(limiting_cumulants(l), g);
  };
  const double lo = 1e-12, hi = 1e4;
  if (margin(lo) > 0) {
    r.deltaStar = 0.0;
    return r;
  }
  // The margin is nondecreasing in delta for the supported laws; scan for the first sign change.
  double a = lo, fa = margin(lo);
  for (double b = 1e-3; b <= hi; b *= 1.25) {
    double fb = margin(b);
    if (fb > 0) {
      r.deltaStar = find_root(margin, a, b, 1e-14);
      return r;
    }
    a = b;
    fa = fb;
  }
  (void)fa;
  r.deltaStar = std::numeric_limits<double>::infinity();
  return r;
}

SpectralTheory spectral_theory(const CumulantSet& c, double delta, const GbarMoments& g, double rho) {
  SpectralTheory th;
  const double k2 = c.k2, k4 = c.k4, k6 = c.k6;
  const double K4 = k4 / (k2 * k2), K6 = k6 / (k2 * k2 * k2);
  const double A = K4 + delta;
  const double M1 = g.z2, M2 = g.sq, M3 = g.sqz2;
  th.gamma = compute_gamma(c, delta, g);
  th.w3 = 1 + k4 / (delta * k2 * k2);
  th.w4 = delta * M1;
  th.lambda1Limit = k2;
  th.thresholdSatisfied = A * M1 * M1 > M2;
  if (!th.thresholdSatisfied) {
    th.w1 = th.w2 = th.eta = kNaN;
    return th;
  }
  const double den = A * A * M1 * M1 - A * M2;
  th.w1 = rho * ((k4 / k2 + delta * k2) * M3 + (k6 / (k2 * k2) - k4 * k4 / (k2 * k2 * k2) + delta * k4 / k2) * M1 * M1) / den;
  th.w2 = rho / delta * (A * A * M3 + K4 * A * A * M1 * M1 + (K6 - 2 * K4 * K4) * M2) / den;
  th.eta = delta * den / (A * A * A * M1 * M1 + A * A * M3 + (K6 - 2 * K4 * K4 - delta * A) * M2);
  th.etaDefined = true;
  return th;
}

Vec preprocess_responses(const Vec& y, const GlmModel& model, const Preprocess& pre) {
  Vec t(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double g = model.gbar(y[i]);
    double den = g + pre.shift();
    if (pre.variant == PreprocessVariant::Optimal ? !(den > 0) : den == 0) {
      std::ostringstream os;
      os << "gbar(y) + shift <= 0 at y[" << i << "] = " << y[i];
      throw Error(pre.variant == PreprocessVariant::Optimal ? ErrorKind::PreprocessDomain : ErrorKind::Domain,
                  os.str());
    }
    t[i] = g / den;
  }
  return t;
}

SpectralResult build_D(const Design& design, const Vec& t) {
  if (t.size() != design.n) throw Error(ErrorKind::InvalidDimension, "preprocessed responses must have length n");
  const int d = design.d;
  Mat TX = t.asDiagonal() * design.X;
  Mat D = design.X.transpose() * TX;
  lapack_int found = 0;
  Vec w(2);
  Mat Z(d, 2);
  std::vector<lapack_int> isuppz(4);
  lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', d, D.data(), d, 0.0, 0.0, d - 1, d, 0.0,
                                   &found, w.data(), Z.data(), d, isuppz.data());
  if (info != 0 || found != 2) throw Error(ErrorKind::NonConvergence, "dsyevr failed, info=" + std::to_string(info));
  SpectralResult r;
  r.lambda1 = w[1];
  r.lambda2 = w[0];
  r.v1 = Z.col(1);
  r.v1.normalize();
  for (Eigen::Index i = 0; i < r.v1.size(); ++i) {
    if (r.v1[i] != 0.0) {
      if (r.v1[i] < 0) r.v1 = -r.v1;
      break;
    }
  }
  return r;
}

SpectralResult build_D(const Design& design, const Vec& y, const GlmModel& model, const Preprocess& pre) {
  return build_D(design, preprocess_responses(y, model, pre));
}

double overlap(const Vec& estimate, const Vec& truth) {
  double ne = estimate.norm(), nt = truth.norm();
  if (ne == 0 || nt == 0) return 0.0;
  return std::abs(estimate.dot(truth)) / (ne * nt);
}

Rule limiting_T_law(const GlmModel& model, double shift, int nodes) {
  Rule out;
  if (model.kind == ModelKind::PhaseRetrieval) {
    Rule gh = gauss_hermite(nodes);
    const double sd = std::sqrt(model.sigma2);
    for (std::size_t i = 0; i < gh.size(); ++i) {
      double g = model.gbar(sd * std::abs(gh.x[i]));
      out.x.push_back(g / (g + shift));
      out.w.push_back(gh.w[i]);
    }
    return out;
  }
  // Marginal of Y: P(Y = y) = (1 + 2s)^{-1/2} (2y - 1)!! / y! (s / (1 + 2s))^y.
  const double s = model.sigma2, q = s / (1 + 2 * s);
  double logp = -0.5 * std::log(1 + 2 * s);
  double total = 0.0;
  for (int y = 0; total < 1 - 1e-16 && y < 100000; ++y) {
    if (y > 0) logp += std::log((2.0 * y - 1) / y * q);
    double p = std::exp(logp);
    double g = model.gbar(y);
    out.x.push_back(g / (g + shift));
    out.w.push_back(p);
    total += p;
    if (p < 1e-300) break;
  }
  return out;
}

Rule empirical_law(const std::vector<double>& samples) {
  Rule r;
  r.x = samples;
  r.w.assign(samples.size(), 1.0 / samples.size());
  return r;
}

Rule empirical_law(const Vec& samples) {
  return empirical_law(std::vector<double>(samples.data(), samples.data() + samples.size()));
}

BulkEdge::BulkEdge(const LimitingSpectrum& lawS, Rule lawT) : S_(lawS), T_(std::move(lawT)) {
  if (T_.size() == 0) throw Error(ErrorKind::Configuration, "empty law of T");
  supT_ = *std::max_element(T_.x.begin(), T_.x.end());
  meanS_ = S_.expect_n([](double x) { return x; });
}

double BulkEdge::expect_T(double a, int power, bool numeratorT) const {
  double s = 0.0;
  for (std::size_t i = 0; i < T_.size(); ++i) {
    double t = T_.x[i];
    double den = a - t;
    double v = power == 1 ? 1.0 / den : 1.0 / (den * den);
    s += T_.w[i] * (numeratorT ? t * v : v);
  }
  return s;
}

BulkEdge::Moments BulkEdge::s_moments(double w) const {
  Moments m{0, 0, 0, 0};
  for (std::size_t i = 0; i < S_.nonzero.size(); ++i) {
    double p = S_.massN * S_.nonzero.w[i], x = S_.nonzero.x[i];
    double inv = 1.0 / (w - x);
    m.s1 += p * x * inv;
    m.s0 += p * inv;
    m.s2 += p * x * inv * inv;
    m.s00 += p * inv * inv;
  }
  if (S_.massN < 1.0) {
    double p = 1.0 - S_.massN;
    m.s0 += p / w;
    m.s00 += p / (w * w);
  }
  return m;
}

std::optional<double> BulkEdge::omega(double a) const {
  if (!(a > supT_)) return std::nullopt;
  const double L = expect_T(a, 1, true);
  if (L == 0.0) return std::nullopt;
  auto f = [&](double w) { return s_moments(w).s1 - L; };
  if (L > 0) {
    double lo = S_.hi + 1e-12 * std::max(1.0, std::abs(S_.hi));
    if (!(f(lo) > 0)) return std::nullopt;
    double step = std::max(1.0, std::abs(S_.hi));
    double hi = S_.hi + step;
    while (f(hi) > 0) {
      step *= 4;
      hi = S_.hi + step;
      if (step > 1e300) return std::nullopt;
    }
    return find_root(f, lo, hi, 1e-15 * std::max(1.0, hi), 2000);
  }
  double hi = S_.lo - 1e-12 * std::max(1.0, std::abs(S_.lo));
  if (!(f(hi) < 0)) return std::nullopt;
  double step = std::max(1.0, std::abs(S_.lo));
  double lo = S_.lo - step;
  while (f(lo) < 0) {
    step *= 4;
    lo = S_.lo - step;
    if (step > 1e300) return std::nullopt;
  }
  return find_root(f, lo, hi, 1e-15 * std::max(1.0, std::abs(lo)), 2000);
}

double BulkEdge::psi(double a) const {
  auto w = omega(a);
  if (!w) {
    if (a > supT_ && expect_T(a, 1, true) == 0.0) return a * meanS_;
    return std::numeric_limits<double>::quiet_NaN();
  }
  Moments m = s_moments(*w);
  return a * m.s1 / m.s0;
}

double BulkEdge::psi_prime(double a) const {
  auto w = omega(a);
  if (!w) return std::numeric_limits<double>::quiet_NaN();
  Moments m = s_moments(*w);
  const double t2 = expect_T(a, 2, true);
  const double dw = t2 / m.s2;
  // s1 s00 - s2 s0 = -Q0^2 Var_q(x) with q = p / (w - x)^2. The direct difference cancels
  // catastrophically as |w| grows (a near the zero of E[T / (a - T)]).
  double q0 = 0.0, q1 = 0.0;
  auto each = [&](auto&& f) {
    for (std::size_t i = 0; i < S_.nonzero.size(); ++i) f(S_.massN * S_.nonzero.w[i], S_.nonzero.x[i]);
    if (S_.massN < 1.0) f(1.0 - S_.massN, 0.0);
  };
  each([&](double p, double x) {
    double q = p / ((*w - x) * (*w - x));
    q0 += q;
    q1 += q * x;
  });
  const double mean = q1 / q0;
  double var = 0.0;
  each([&](double p, double x) { var += p / ((*w - x) * (*w - x)) * (x - mean) * (x - mean); });
  var /= q0;
  return m.s1 / m.s0 - a * dw * q0 * q0 * var / (m.s0 * m.s0);
}

EdgeResult BulkEdge::solve(double hi, double cap, int gridPoints) const {
  if (gridPoints < 10) throw Error(ErrorKind::Configuration, "edge scan needs at least 10 grid points");
  const double start = 1e-6;
  for (;;) {
    if (hi <= supT_ + start) hi = supT_ + 1.0;
    const double span = hi - supT_;
    std::vector<double> a(gridPoints), dp(gridPoints);
    for (int k = 0; k < gridPoints; ++k) {
      a[k] = supT_ + start * std::pow(span / start, static_cast<double>(k) / (gridPoints - 1));
      dp[k] = psi_prime(a[k]);
    }
    if (std::isfinite(dp.back()) && dp.back() < 0 && hi < cap) {
      hi = std::min(cap, hi * 4);
      continue;
    }
    for (int k = gridPoints - 2; k >= 0; --k) {
      if (!std::isfinite(dp[k]) || !std::isfinite(dp[k + 1])) continue;
      if (!(dp[k] < 0 && dp[k + 1] > 0)) continue;
      auto f = [&](double x) {
        double v = psi_prime(x);
        return std::isfinite(v) ? v : 0.0;
      };
      double root = find_root(f, a[k], a[k + 1], 1e-11, 500);
      double at = psi_prime(root);
      // A sign change through a pole of psi' is not a critical point.
      if (!(std::abs(at) < 1e-4 * (std::abs(dp[k]) + std::abs(dp[k + 1])) + 1e-9)) continue;
      return EdgeResult{root, psi(root)};
    }
    if (hi >= cap) break;
    hi = std::min(cap, hi * 4);
  }
  std::ostringstream os;
  os << "no critical point of psi on (" << supT_ << ", " << cap << "]";
  throw Error(ErrorKind::EdgeSolver, os.str());
}

}  // namespace glmamp
