#pragma once

#include "glmamp/designs.hpp"

#include <array>
#include <string>

namespace glmamp {

// Moments of the spectral laws of XX^T (m) and X^T X (mp), and rectangular free cumulants of XX^T.
struct CumulantSet {
  double deltaHat = 1.0;
  double m2 = 0, m4 = 0, m6 = 0, m8 = 0;
  double m2p = 0, m4p = 0, m6p = 0, m8p = 0;
  double k2 = 0, k4 = 0, k6 = 0, k8 = 0;

  // kappa_4 / kappa_2^2 + delta, always equal to (m4 - m2^2) / m2^2.
  double excess() const { return k4 / (k2 * k2) + deltaHat; }
  std::string to_json() const;
};

// (m2, m4, m6, m8) of law(Lambda_n^2).
std::array<double, 4> moments_from_law(const SpectralLaw& law);
std::array<double, 4> moments_from_law(const LimitingSpectrum& law);

CumulantSet cumulants_from_moments(const std::array<double, 4>& m, double deltaHat);

// The two closed forms of the moment-cumulant relations evaluated separately.
std::array<double, 4> cumulants_m_form(const std::array<double, 4>& m, double deltaHat);
std::array<double, 4> cumulants_mp_form(const std::array<double, 4>& mp, double deltaHat);

CumulantSet empirical_cumulants(const Design& design);
CumulantSet limiting_cumulants(const SpectralLaw& law);

}  // namespace glmamp
