#include "glmamp/models.hpp"

#include "glmamp/numerics.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>
#include <gsl/gsl_sf_psi.h>

#include <cmath>
#include <functional>
#include <memory>

namespace glmamp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * kPi); }

// State of the paired Stein recursion for G ~ N(mu, v): r = R_{2y+1}, logM = log E[G^{2y}].
// Pairs R_{2j-1} R_{2j} = mu R_{2j-1} + v (2j - 1) avoid dividing by a vanishing R_{2j-1}.
struct PairedStein {
  double mu, v;
  double r;
  double logM = 0.0;
  int y = 0;

  PairedStein(double mu_, double v_) : mu(mu_), v(v_), r(mu_) {}
  double next_pair() const { return mu * r + v * (2 * y + 1); }
  void advance() {
    double pair = next_pair();
    logM += std::log(pair);
    r = mu + 2.0 * (y + 1) * v * r / pair;
    ++y;
  }
  double variance() const { return next_pair() - r * r; }
};

PairedStein stein_at(double p, double y, double tau1) {
  const double v = 1.0 / (tau1 + 2.0);
  PairedStein s(p * v, v);
  const int target = static_cast<int>(std::lround(y));
  while (s.y < target) s.advance();
  return s;
}

// E[g(P, Y)^2 | P = p] for the Poisson link, Z | P = p ~ N(p / tau1, 1 / tau1).
double poisson_conditional_sq(double p, double tau1) {
  const double v = 1.0 / (tau1 + 2.0);
  const double logk = 0.5 * std::log(v * tau1) + 0.5 * p * p * v - p * p / (2 * tau1);
  const double meanY = p * p / (tau1 * tau1) + 1.0 / tau1;
  PairedStein s(p * v, v);
  double total = 0.0, mass = 0.0;
  for (;;) {
    double pm = std::exp(logk + s.logM - std::lgamma(s.y + 1.0));
    total += pm * s.r * s.r;
    mass += pm;
    if (s.y > meanY && pm < 1e-18 * std::max(mass, 1e-300)) break;
    s.advance();
  }
  return total;
}

template <class F>
double poisson_conditional_sum(double p, double tau1, F&& f) {
  const double v = 1.0 / (tau1 + 2.0);
  const double logk = 0.5 * std::log(v * tau1) + 0.5 * p * p * v - p * p / (2 * tau1);
  const double meanY = p * p / (tau1 * tau1) + 1.0 / tau1;
  PairedStein s(p * v, v);
  double total = 0.0, mass = 0.0;
  for (;;) {
    double pm = std::exp(logk + s.logM - std::lgamma(s.y + 1.0));
    total += pm * f(static_cast<double>(s.y));
    mass += pm;
    if (s.y > meanY && pm < 1e-18 * std::max(mass, 1e-300)) break;
    s.advance();
  }
  return total;
}

// J(b) = int_0^inf x e^{-x} sech(b x) dx.
double sech_laplace(double b) {
  b = std::abs(b);
  if (b < 0.01) {
    double b2 = b * b;
    return 1 - 3 * b2 + 25 * b2 * b2 - 427 * b2 * b2 * b2 + 12465 * b2 * b2 * b2 * b2;
  }
  double x = (1 + b) / (2 * b);
  return (gsl_sf_psi_1(x / 2) - gsl_sf_psi_1((x + 1) / 2)) / (8 * b * b);
}

struct GslIntegrator {
  std::unique_ptr<gsl_integration_workspace, decltype(&gsl_integration_workspace_free)> ws;
  explicit GslIntegrator(std::size_t n = 2000)
      : ws(gsl_integration_workspace_alloc(n), gsl_integration_workspace_free) {}

  double infinite(const std::function<double(double)>& f, double epsabs, double epsrel) {
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
    F.params = const_cast<std::function<double(double)>*>(&f);
    double result = 0, err = 0;
    int status = gsl_integration_qagi(&F, epsabs, epsrel, 2000, ws.get(), &result, &err);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
      throw Error(ErrorKind::NonConvergence, std::string("adaptive integration: ") + gsl_strerror(status));
    return result;
  }

  double upper(const std::function<double(double)>& f, double a, double epsabs, double epsrel) {
    gsl_function F;
    F.function = [](double x, void* p) { return (*static_cast<const std::function<double(double)>*>(p))(x); };
    F.params = const_cast<std::function<double(double)>*>(&f);
    double result = 0, err = 0;
    int status = gsl_integration_qagiu(&F, a, epsabs, epsrel, 2000, ws.get(), &result, &err);
    if (status != GSL_SUCCESS && status != GSL_EROUND)
      throw Error(ErrorKind::NonConvergence, std::string("adaptive integration: ") + gsl_strerror(status));
    return result;
  }
};

struct GslQuiet {
  gsl_error_handler_t* old;
  GslQuiet() : old(gsl_set_error_handler_off()) {}
  ~GslQuiet() { gsl_set_error_handler(old); }
};

double central_difference(const std::function<double(double)>& g, double p) {
  double h = 1e-5 * std::max(1.0, std::abs(p));
  return (g(p + h) - g(p - h)) / (2 * h);
}

}  // namespace

GlmModel GlmModel::from_name(const std::string& name, double sigma2, int quadDegree) {
  if (!(sigma2 > 0)) throw Error(ErrorKind::Configuration, "sigma2 must be positive");
  if (quadDegree < 2) throw Error(ErrorKind::Configuration, "quadrature degree must be >= 2");
  GlmModel m;
  m.sigma2 = sigma2;
  m.quadDegree = quadDegree;
  if (name == "phase-retrieval")
    m.kind = ModelKind::PhaseRetrieval;
  else if (name == "poisson")
    m.kind = ModelKind::Poisson;
  else
    throw Error(ErrorKind::Configuration, "unknown model '" + name + "'");
  return m;
}

std::string GlmModel::name() const { return kind == ModelKind::PhaseRetrieval ? "phase-retrieval" : "poisson"; }

Vec phase_retrieval_sample(const Vec& z) { return z.cwiseAbs(); }

Vec poisson_sample(const Vec& z, Rng& rng) {
  Vec y(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    double mean = z[i] * z[i];
    if (mean <= 0) {
      y[i] = 0;
      continue;
    }
    std::poisson_distribution<long long> pd(mean);
    y[i] = static_cast<double>(pd(rng));
  }
  return y;
}

Vec GlmModel::sample(const Vec& z, Rng& rng) const {
  return kind == ModelKind::PhaseRetrieval ? phase_retrieval_sample(z) : poisson_sample(z, rng);
}

double GlmModel::gbar(double y) const {
  if (kind == ModelKind::PhaseRetrieval) return y * y / sigma2 - 1.0;
  return (2 * y + 1) / (1 + 2 * sigma2) - 1.0;
}

GbarMoments GlmModel::gbar_moments() const {
  GbarMoments g;
  if (kind == ModelKind::PhaseRetrieval) {
    // gbar = Zbar^2 - 1 with E[Zbar^4] = 3, E[Zbar^6] = 15.
    g.mean = 0;
    g.sq = 2;
    g.z2 = 2;
    g.sqz2 = 10;
    return g;
  }
  // gbar = 2cY + (c - 1), c = 1 / (1 + 2 s), with E[Y | Z] = Z^2 and E[Y^2 | Z] = Z^2 + Z^4.
  const double s = sigma2, c = 1.0 / (1 + 2 * s);
  g.mean = 2 * c * s + c - 1;
  g.z2 = 6 * c * s + c - 1;
  g.sq = 4 * c * c * (s + 3 * s * s) + 4 * c * (c - 1) * s + (c - 1) * (c - 1);
  g.sqz2 = 4 * c * c * (3 * s + 15 * s * s) + 12 * c * (c - 1) * s + (c - 1) * (c - 1);
  return g;
}

double GlmModel::threshold_constant() const {
  GbarMoments g = gbar_moments();
  return 1.0 + g.sq / (g.z2 * g.z2);
}

double gz1_phase_retrieval(double p, double y, double) { return y * std::tanh(p * y); }

double gz1_poisson(double p, double y, double tau1) {
  if (y < 0 || y != std::floor(y)) throw Error(ErrorKind::Domain, "Poisson response must be a nonnegative integer");
  return stein_at(p, y, tau1).r;
}

double GlmModel::gz1(double p, double y, double tau1) const {
  return kind == ModelKind::PhaseRetrieval ? gz1_phase_retrieval(p, y, tau1) : gz1_poisson(p, y, tau1);
}

double GlmModel::dgz1(double p, double y, double tau1) const {
  if (kind == ModelKind::PhaseRetrieval) {
    double s = 1.0 / std::cosh(p * y);
    return y * y * s * s;
  }
  return stein_at(p, y, tau1).variance();
}

std::vector<double> stein_ratio(double a, double b, double mu, double sigma2, int kMax) {
  if (kMax < 1) throw Error(ErrorKind::Configuration, "kMax must be >= 1");
  std::vector<double> R(kMax);
  R[0] = a + b * mu;
  for (int k = 1; k < kMax; ++k) {
    if (R[k - 1] == 0.0) throw Error(ErrorKind::DegenerateRatio, "R_" + std::to_string(k) + " = 0");
    R[k] = a + b * (mu + sigma2 * k * b / R[k - 1]);
  }
  return R;
}

double c1_phase_retrieval(double tau1, double sigma2, int degree) {
  if (degree < 2) throw Error(ErrorKind::Configuration, "quadrature degree must be >= 2");
  const double a = tau1 - 1.0 / sigma2;
  if (a <= 0) return sigma2;
  // Polar reduction of E[Y^2 sech^2(PY)] to a one-dimensional integral of J.
  const double c = std::sqrt(a / tau1);
  Rule r = gauss_legendre(degree, 0.0, kPi / 2);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * sech_laplace(c * std::sin(r.x[i]));
  return 2.0 / (kPi * std::sqrt(sigma2) * std::pow(tau1, 1.5)) * s;
}

double c1_poisson(double tau1, double sigma2, int degree) {
  if (degree < 2) throw Error(ErrorKind::Configuration, "quadrature degree must be >= 2");
  const double a = tau1 - 1.0 / sigma2;
  if (a <= 0) return sigma2;
  const double sp = std::sqrt(a * tau1 * sigma2);
  constexpr int panels = 28;
  constexpr double upper = 14.0;
  Rule r = gauss_legendre(degree, 0.0, upper / panels);
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    double off = k * upper / panels;
    for (std::size_t i = 0; i < r.size(); ++i) {
      double x = off + r.x[i];
      total += r.w[i] * normal_pdf(x) * poisson_conditional_sq(sp * x, tau1);
    }
  }
  return sigma2 - 2 * total;
}

double GlmModel::c1(double tau1) const {
  if (tau1 < 1.0 / sigma2 - 1e-12) throw Error(ErrorKind::Domain, "tau1 must be >= 1/sigma2");
  return kind == ModelKind::PhaseRetrieval ? c1_phase_retrieval(tau1, sigma2, quadDegree)
                                           : c1_poisson(tau1, sigma2, quadDegree);
}

double GlmModel::expected_dgz1_adaptive(double tau1) const {
  const double a = tau1 - 1.0 / sigma2;
  if (a < 0) throw Error(ErrorKind::Domain, "tau1 must be >= 1/sigma2");
  GslQuiet quiet;
  if (kind == ModelKind::PhaseRetrieval) {
    const double sd = std::sqrt(sigma2), sa = std::sqrt(a);
    GslIntegrator outer, inner;
    // The integrand is even in z and, for large a, supported on |z| of order 1 / sqrt(a); z = s u
    // puts that scale at u = O(1).
    const double s = a > 1.0 ? 1.0 / sa : 1.0;
    std::function<double(double)> fu = [&](double u) {
      double z = s * u, y = std::abs(z);
      std::function<double(double)> fk = [&](double k) {
        double p = a * z + sa * k;
        return normal_pdf(k) * central_difference([y](double q) { return y * std::tanh(q * y); }, p);
      };
      return normal_pdf(z / sd) / sd * s * inner.infinite(fk, 1e-13 * s * s, 1e-11);
    };
    return 2 * outer.upper(fu, 0.0, 1e-12 * s * s * s, 1e-11);
  }
  if (a == 0) {
    // P = 0 and Z | Y = y has the density of G ~ N(0, 1 / (tau1 + 2)) tilted by G^{2y}.
    return poisson_conditional_sum(0.0, tau1, [&](double y) {
      return central_difference([&](double q) { return gz1_poisson(q, y, tau1); }, 0.0);
    });
  }
  const double sp = std::sqrt(a * tau1 * sigma2);
  GslIntegrator integ;
  std::function<double(double)> fx = [&](double x) {
    if (x > 40.0) return 0.0;  // pdf underflows; the y-sum would not terminate
    double p = sp * x;
    return normal_pdf(x) * poisson_conditional_sum(p, tau1, [&](double y) {
             return central_difference([&](double q) { return gz1_poisson(q, y, tau1); }, p);
           });
  };
  return 2 * integ.upper(fx, 0.0, 1e-12, 1e-11);
}

GaussianPrior::GaussianPrior(double rho_) : rho(rho_) {
  if (!(rho > 0)) throw Error(ErrorKind::Configuration, "prior variance must be positive");
}

std::vector<double> sample_preprocessed(const GlmModel& model, double shift, int count, Rng& rng) {
  std::normal_distribution<double> nd(0.0, std::sqrt(model.sigma2));
  Vec z(count);
  for (int i = 0; i < count; ++i) z[i] = nd(rng);
  Vec y = model.sample(z, rng);
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) {
    double g = model.gbar(y[i]);
    t[i] = g / (g + shift);
  }
  return t;
}

}  // namespace glmamp
