#pragma once

#include "glmamp/common.hpp"
#include "glmamp/numerics.hpp"
#include "glmamp/rng.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace glmamp {

enum class LawKind { ScaledUniform, ScaledBeta, MarchenkoPastur, Empirical };

// Law of the singular values. For synthetic laws the base variable is c*U with U ~ Beta(a, b)
// or U ~ Unif[1, 2]; singular values are that times sqrt(delta) when delta > 1.
struct SpectralLaw {
  LawKind kind = LawKind::ScaledBeta;
  double a = 1.0, b = 2.0;
  double delta = 1.0;
  double c = 1.0;
  // Empirical only: squared singular values and the matrix shape they came from.
  std::vector<double> squared;
  int n = 0, d = 0;

  static SpectralLaw uniform12(double delta);
  static SpectralLaw beta(double a, double b, double delta);
  static SpectralLaw marchenko_pastur(double delta);
  static SpectralLaw empirical(std::vector<double> squaredSingularValues, int n, int d);
  static SpectralLaw from_tag(const std::string& tag, double delta);

  std::string tag() const;
  // E[U^k] of the unscaled base variable.
  double base_raw_moment(int k) const;
  // E[(c U)^k].
  double scaled_raw_moment(int k) const;
  bool normalized() const;
};

// Limiting laws of Lambda_n^2 and Lambda_d^2 as mixtures of the nonzero part with an atom at 0.
struct LimitingSpectrum {
  double delta = 1.0;
  Rule nonzero;        // probability rule for the nonzero squared singular values
  double massN = 1.0;  // weight of the nonzero part in law(Lambda_n^2)
  double massD = 1.0;  // weight of the nonzero part in law(Lambda_d^2)
  double lo = 0.0, hi = 0.0;  // support of the nonzero part

  template <class F>
  double expect_nonzero(F&& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nonzero.size(); ++i) s += nonzero.w[i] * f(nonzero.x[i]);
    return s;
  }
  template <class F>
  double expect_n(F&& f) const {
    double s = massN * expect_nonzero(f);
    if (massN < 1.0) s += (1.0 - massN) * f(0.0);
    return s;
  }
  template <class F>
  double expect_d(F&& f) const {
    double s = massD * expect_nonzero(f);
    if (massD < 1.0) s += (1.0 - massD) * f(0.0);
    return s;
  }
};

LimitingSpectrum limiting_spectrum(const SpectralLaw& law, int nodes = 256);

enum class DesignKind { HaarSvd, CdpBinary, CdpTernary, RawMatrix };

struct Design {
  DesignKind kind = DesignKind::RawMatrix;
  int n = 0, d = 0;
  Mat X;
  Vec sv;  // length min(n, d), descending
  // Thin factors: X = U diag(sv) V^T. Columns paired with zero singular values may be zero.
  Mat U, V;
  bool hasFactors = false;

  int rank_dim() const { return static_cast<int>(sv.size()); }
  double delta() const { return static_cast<double>(n) / d; }

  // f(XX^T) p, f(X^T X) r, f(X) r and f(X)^T p, with f applied to squared singular values for
  // the symmetric forms and to singular values for the rectangular ones.
  Vec apply_gram_n(const std::function<double(double)>& f, const Vec& p) const;
  Vec apply_gram_d(const std::function<double(double)>& f, const Vec& r) const;
  Vec apply_rect(const std::function<double(double)>& f, const Vec& r) const;
  Vec apply_rect_t(const std::function<double(double)>& f, const Vec& p) const;

  double reconstruction_error() const;
  std::vector<double> squared_singular_values() const;
  void write_csv(const std::string& path) const;
};

Mat sample_haar_orthogonal(int m, Rng& rng);
// First k columns of an m x m Haar matrix.
Mat sample_haar_columns(int m, int k, Rng& rng);

std::vector<double> sample_spectrum(const SpectralLaw& law, int count, Rng& rng);

Design build_design(int n, int d, const SpectralLaw& law, Rng& rng, bool withFactors = true);

enum class CdpVariant { Binary, Ternary };

// Blocks C^T D_i stacked vertically, C the orthonormal DCT-II matrix.
Design build_cdp_design(int d, int delta, CdpVariant variant, Rng& rng,
                        const std::optional<std::vector<Vec>>& forcedDiagonals = std::nullopt);
Mat dct_matrix(int d);

// Singular values of an arbitrary matrix, descending.
Vec singular_values(const Mat& X);

}  // namespace glmamp
