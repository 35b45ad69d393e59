#pragma once

#include "glmamp/common.hpp"
#include "glmamp/rng.hpp"

#include <string>
#include <vector>

namespace glmamp {

enum class ModelKind { PhaseRetrieval, Poisson };

// (E[g], E[g^2], E[g Zbar^2], E[g^2 Zbar^2]) for g = gbar(Y).
struct GbarMoments {
  double mean = 0, sq = 0, z2 = 0, sqz2 = 0;
};

// A GLM link with Z ~ N(0, sigma2). Only the scalar functionals used by the algorithms are exposed.
struct GlmModel {
  ModelKind kind = ModelKind::PhaseRetrieval;
  double sigma2 = 1.0;
  int quadDegree = 50;

  static GlmModel from_name(const std::string& name, double sigma2 = 1.0, int quadDegree = 50);
  std::string name() const;

  Vec sample(const Vec& z, Rng& rng) const;
  double gbar(double y) const;
  GbarMoments gbar_moments() const;
  // 1 + E[gbar^2] / E[gbar Zbar^2]^2.
  double threshold_constant() const;

  // Posterior mean E[Z | P = p, Y = y] and variance Var[Z | P = p, Y = y] (the p-derivative of the mean).
  double gz1(double p, double y, double tau1) const;
  double dgz1(double p, double y, double tau1) const;

  // c1 = E[Var[Z | P, Y]] and Ez = E[Z E[Z | P, Y]] = sigma2 - c1.
  double c1(double tau1) const;
  double Ez(double tau1) const { return sigma2 - c1(tau1); }
  double gz1_mean_sq(double tau1) const { return Ez(tau1); }

  // E[d/dp gz1(P, Y)] by adaptive integration of a central difference; independent of c1().
  double expected_dgz1_adaptive(double tau1) const;
};

Vec phase_retrieval_sample(const Vec& z);
Vec poisson_sample(const Vec& z, Rng& rng);

double gz1_phase_retrieval(double p, double y, double tau1);
double gz1_poisson(double p, double y, double tau1);

// R_1..R_kMax with R_1 = a + b mu and R_{k+1} = a + b (mu + sigma2 k b / R_k).
std::vector<double> stein_ratio(double a, double b, double mu, double sigma2, int kMax);

// Quadrature schemes behind c1(); degree is the Gauss-Legendre order per panel.
double c1_phase_retrieval(double tau1, double sigma2, int degree);
double c1_poisson(double tau1, double sigma2, int degree);

struct GaussianPrior {
  double rho = 1.0;

  explicit GaussianPrior(double rho_ = 1.0);
  double gx1(double r, double gamma1) const { return rho * r / (gamma1 * rho + 1.0); }
  double v1(double gamma1) const { return rho / (gamma1 * rho + 1.0); }
  double Ex(double gamma1) const { return rho * rho * gamma1 / (gamma1 * rho + 1.0); }
};

// Draws of T = gbar(Y) / (gbar(Y) + shift) under Z ~ N(0, sigma2).
std::vector<double> sample_preprocessed(const GlmModel& model, double shift, int count, Rng& rng);

}  // namespace glmamp
