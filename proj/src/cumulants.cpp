#include "glmamp/cumulants.hpp"

#include <json.hpp>

#include <cmath>

namespace glmamp {

std::string CumulantSet::to_json() const {
  nlohmann::json j;
  j["deltaHat"] = deltaHat;
  j["m"] = {m2, m4, m6, m8};
  j["mp"] = {m2p, m4p, m6p, m8p};
  j["kappa"] = {k2, k4, k6, k8};
  return j.dump();
}

std::array<double, 4> moments_from_law(const SpectralLaw& law) {
  const double delta = law.delta;
  std::array<double, 4> m{};
  switch (law.kind) {
    case LawKind::MarchenkoPastur:
      m[0] = 1.0;
      m[1] = 1.0 + delta;
      m[2] = 1.0 + 3 * delta + delta * delta;
      m[3] = 1.0 + 6 * delta + 6 * delta * delta + delta * delta * delta;
      return m;
    case LawKind::ScaledUniform:
    case LawKind::ScaledBeta: {
      // law(Lambda_n^2) = law(lambda~^2) for delta <= 1, else delta^{-1} law(delta lambda~^2) + atom.
      for (int k = 1; k <= 4; ++k) {
        double base = law.scaled_raw_moment(2 * k);
        m[k - 1] = delta > 1 ? std::pow(delta, k - 1) * base : base;
      }
      return m;
    }
    case LawKind::Empirical:
      return moments_from_law(limiting_spectrum(law));
  }
  return m;
}

std::array<double, 4> moments_from_law(const LimitingSpectrum& law) {
  std::array<double, 4> m{};
  for (int k = 1; k <= 4; ++k) m[k - 1] = law.expect_n([k](double x) { return std::pow(x, k); });
  return m;
}

std::array<double, 4> cumulants_m_form(const std::array<double, 4>& m, double dh) {
  const double m2 = m[0], m4 = m[1], m6 = m[2], m8 = m[3];
  std::array<double, 4> k{};
  k[0] = m2;
  k[1] = m4 - (1 + dh) * m2 * m2;
  k[2] = m6 - (3 + 3 * dh) * m4 * m2 + (2 + 3 * dh + 2 * dh * dh) * m2 * m2 * m2;
  k[3] = m8 - (4 + 4 * dh) * m6 * m2 - (2 + 2 * dh) * m4 * m4 +
         (10 + 16 * dh + 10 * dh * dh) * m4 * m2 * m2 -
         (5 + 10 * dh + 10 * dh * dh + 5 * dh * dh * dh) * std::pow(m2, 4);
  return k;
}

std::array<double, 4> cumulants_mp_form(const std::array<double, 4>& mp, double dh) {
  const double p2 = mp[0], p4 = mp[1], p6 = mp[2], p8 = mp[3];
  const double d2 = dh * dh, d3 = d2 * dh, d4 = d3 * dh;
  std::array<double, 4> k{};
  k[0] = p2 / dh;
  k[1] = p4 / dh - (1 + dh) / d2 * p2 * p2;
  k[2] = p6 / dh - (3 + 3 * dh) / d2 * p4 * p2 + (2 + 3 * dh + 2 * d2) / d3 * p2 * p2 * p2;
  k[3] = p8 / dh - (4 + 4 * dh) / d2 * p6 * p2 - (2 + 2 * dh) / d2 * p4 * p4 +
         (10 + 16 * dh + 10 * d2) / d3 * p4 * p2 * p2 - (5 + 10 * dh + 10 * d2 + 5 * d3) / d4 * std::pow(p2, 4);
  return k;
}

CumulantSet cumulants_from_moments(const std::array<double, 4>& m, double deltaHat) {
  if (!(deltaHat > 0)) throw Error(ErrorKind::Configuration, "deltaHat must be positive");
  CumulantSet c;
  c.deltaHat = deltaHat;
  c.m2 = m[0];
  c.m4 = m[1];
  c.m6 = m[2];
  c.m8 = m[3];
  c.m2p = deltaHat * m[0];
  c.m4p = deltaHat * m[1];
  c.m6p = deltaHat * m[2];
  c.m8p = deltaHat * m[3];
  auto k = cumulants_m_form(m, deltaHat);
  c.k2 = k[0];
  c.k4 = k[1];
  c.k6 = k[2];
  c.k8 = k[3];
  return c;
}

CumulantSet empirical_cumulants(const Design& design) {
  if (design.sv.size() == 0) throw Error(ErrorKind::Configuration, "design has no singular values");
  std::array<double, 4> m{};
  for (Eigen::Index i = 0; i < design.sv.size(); ++i) {
    double x = design.sv[i] * design.sv[i];
    double p = x;
    for (int k = 0; k < 4; ++k, p *= x) m[k] += p;
  }
  for (double& v : m) v /= design.n;
  return cumulants_from_moments(m, design.delta());
}

CumulantSet limiting_cumulants(const SpectralLaw& law) {
  return cumulants_from_moments(moments_from_law(law), law.delta);
}

}  // namespace glmamp
