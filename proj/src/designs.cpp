#include "glmamp/designs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>

namespace glmamp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sample_beta(double a, double b, Rng& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  double x = ga(rng), y = gb(rng);
  return x / (x + y);
}

Mat gaussian_matrix(int rows, int cols, double scale, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat G(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) G(i, j) = scale * nd(rng);
  return G;
}

}  // namespace

SpectralLaw SpectralLaw::uniform12(double delta) {
  SpectralLaw l;
  l.kind = LawKind::ScaledUniform;
  l.delta = delta;
  l.c = std::sqrt(3.0 / 7.0);
  return l;
}

SpectralLaw SpectralLaw::beta(double a, double b, double delta) {
  SpectralLaw l;
  l.kind = LawKind::ScaledBeta;
  l.a = a;
  l.b = b;
  l.delta = delta;
  l.c = 1.0 / std::sqrt(l.base_raw_moment(2));
  return l;
}

SpectralLaw SpectralLaw::marchenko_pastur(double delta) {
  SpectralLaw l;
  l.kind = LawKind::MarchenkoPastur;
  l.delta = delta;
  return l;
}

SpectralLaw SpectralLaw::empirical(std::vector<double> squaredSingularValues, int n, int d) {
  SpectralLaw l;
  l.kind = LawKind::Empirical;
  l.squared = std::move(squaredSingularValues);
  l.n = n;
  l.d = d;
  l.delta = static_cast<double>(n) / d;
  return l;
}

SpectralLaw SpectralLaw::from_tag(const std::string& tag, double delta) {
  if (delta <= 0) throw Error(ErrorKind::Configuration, "delta must be positive");
  if (tag == "uniform12") return uniform12(delta);
  if (tag == "beta12") return beta(1, 2, delta);
  if (tag == "beta31") return beta(3, 1, delta);
  if (tag == "mp") return marchenko_pastur(delta);
  throw Error(ErrorKind::Configuration, "unknown spectral law tag '" + tag + "'");
}

std::string SpectralLaw::tag() const {
  switch (kind) {
    case LawKind::ScaledUniform: return "uniform12";
    case LawKind::ScaledBeta:
      if (a == 1 && b == 2) return "beta12";
      if (a == 3 && b == 1) return "beta31";
      return "beta";
    case LawKind::MarchenkoPastur: return "mp";
    case LawKind::Empirical: return "empirical";
  }
  return "unknown";
}

double SpectralLaw::base_raw_moment(int k) const {
  switch (kind) {
    case LawKind::ScaledUniform: return (std::pow(2.0, k + 1) - 1.0) / (k + 1);
    case LawKind::ScaledBeta: {
      double p = 1.0;
      for (int i = 0; i < k; ++i) p *= (a + i) / (a + b + i);
      return p;
    }
    default:
      throw Error(ErrorKind::Configuration, "base moments only defined for synthetic laws");
  }
}

double SpectralLaw::scaled_raw_moment(int k) const { return std::pow(c, k) * base_raw_moment(k); }

bool SpectralLaw::normalized() const {
  if (kind == LawKind::MarchenkoPastur || kind == LawKind::Empirical) return true;
  return std::abs(scaled_raw_moment(2) - 1.0) < 1e-9 && scaled_raw_moment(4) - 1.0 > 0.0;
}

LimitingSpectrum limiting_spectrum(const SpectralLaw& law, int nodes) {
  LimitingSpectrum ls;
  ls.delta = law.delta;
  const double delta = law.delta;
  if (law.kind == LawKind::Empirical) {
    const std::size_t m = law.squared.size();
    if (m == 0) throw Error(ErrorKind::Configuration, "empty empirical spectrum");
    ls.nonzero.x = law.squared;
    ls.nonzero.w.assign(m, 1.0 / m);
    ls.massN = static_cast<double>(m) / law.n;
    ls.massD = static_cast<double>(m) / law.d;
    auto [mn, mx] = std::minmax_element(law.squared.begin(), law.squared.end());
    ls.lo = *mn;
    ls.hi = *mx;
    return ls;
  }
  ls.massN = delta > 1 ? 1.0 / delta : 1.0;
  ls.massD = delta > 1 ? 1.0 : delta;
  if (law.kind == LawKind::MarchenkoPastur) {
    const double a = std::pow(std::sqrt(delta) - 1.0, 2), b = std::pow(std::sqrt(delta) + 1.0, 2);
    Rule th = gauss_legendre(nodes, 0.0, kPi);
    ls.nonzero.x.resize(nodes);
    ls.nonzero.w.resize(nodes);
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
      double x = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(th.x[i]);
      double s = std::sin(th.x[i]);
      ls.nonzero.x[i] = x;
      ls.nonzero.w[i] = th.w[i] * s * s / x;
      total += ls.nonzero.w[i];
    }
    for (double& w : ls.nonzero.w) w /= total;
    ls.lo = a;
    ls.hi = b;
    return ls;
  }
  if (!law.normalized()) throw Error(ErrorKind::Configuration, "spectral law is not normalized");
  const double scale = law.c * law.c * (delta > 1 ? delta : 1.0);
  double u0 = 0.0, u1 = 1.0;
  if (law.kind == LawKind::ScaledUniform) {
    u0 = 1.0;
    u1 = 2.0;
  }
  Rule r = gauss_legendre(nodes, u0, u1);
  ls.nonzero.x.resize(nodes);
  ls.nonzero.w.resize(nodes);
  const double betaFn = law.kind == LawKind::ScaledBeta ? std::beta(law.a, law.b) : 1.0;
  for (int i = 0; i < nodes; ++i) {
    double u = r.x[i];
    double dens = law.kind == LawKind::ScaledBeta
                      ? std::pow(u, law.a - 1) * std::pow(1 - u, law.b - 1) / betaFn
                      : 1.0;
    ls.nonzero.x[i] = scale * u * u;
    ls.nonzero.w[i] = r.w[i] * dens;
  }
  ls.lo = scale * u0 * u0;
  ls.hi = scale * u1 * u1;
  return ls;
}

Vec Design::apply_gram_n(const std::function<double(double)>& f, const Vec& p) const {
  if (!hasFactors) throw Error(ErrorKind::Configuration, "design has no stored SVD factors");
  const double f0 = f(0.0);
  Vec coef(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) coef[i] = f(sv[i] * sv[i]) - f0;
  Vec proj = U.transpose() * p;
  return f0 * p + U * coef.cwiseProduct(proj);
}

Vec Design::apply_gram_d(const std::function<double(double)>& f, const Vec& r) const {
  if (!hasFactors) throw Error(ErrorKind::Configuration, "design has no stored SVD factors");
  const double f0 = f(0.0);
  Vec coef(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) coef[i] = f(sv[i] * sv[i]) - f0;
  Vec proj = V.transpose() * r;
  return f0 * r + V * coef.cwiseProduct(proj);
}

Vec Design::apply_rect(const std::function<double(double)>& f, const Vec& r) const {
  if (!hasFactors) throw Error(ErrorKind::Configuration, "design has no stored SVD factors");
  Vec coef(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) coef[i] = f(sv[i]);
  Vec proj = V.transpose() * r;
  return U * coef.cwiseProduct(proj);
}

Vec Design::apply_rect_t(const std::function<double(double)>& f, const Vec& p) const {
  if (!hasFactors) throw Error(ErrorKind::Configuration, "design has no stored SVD factors");
  Vec coef(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) coef[i] = f(sv[i]);
  Vec proj = U.transpose() * p;
  return V * coef.cwiseProduct(proj);
}

double Design::reconstruction_error() const {
  if (!hasFactors) throw Error(ErrorKind::Configuration, "design has no stored SVD factors");
  Mat R = U * sv.asDiagonal() * V.transpose();
  return (X - R).norm() / X.norm();
}

std::vector<double> Design::squared_singular_values() const {
  std::vector<double> out(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) out[i] = sv[i] * sv[i];
  return out;
}

void Design::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::Io, "cannot open " + path);
  os << std::setprecision(17);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) os << (j ? "," : "") << X(i, j);
    os << '\n';
  }
}

Mat sample_haar_columns(int m, int k, Rng& rng) {
  if (m < 1 || k < 1 || k > m) throw Error(ErrorKind::InvalidDimension, "Haar sampler needs 1 <= k <= m");
  Eigen::HouseholderQR<Mat> qr(gaussian_matrix(m, k, 1.0, rng));
  Mat Q = qr.householderQ() * Mat::Identity(m, k);
  const auto& R = qr.matrixQR();
  for (int j = 0; j < k; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  return Q;
}

Mat sample_haar_orthogonal(int m, Rng& rng) {
  if (m < 1) throw Error(ErrorKind::InvalidDimension, "dimension must be >= 1");
  return sample_haar_columns(m, m, rng);
}

std::vector<double> sample_spectrum(const SpectralLaw& law, int count, Rng& rng) {
  if (count < 1) throw Error(ErrorKind::InvalidDimension, "count must be >= 1");
  std::vector<double> out(count);
  if (law.kind == LawKind::Empirical) {
    if (static_cast<std::size_t>(count) == law.squared.size()) {
      for (int i = 0; i < count; ++i) out[i] = std::sqrt(law.squared[i]);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, law.squared.size() - 1);
      for (int i = 0; i < count; ++i) out[i] = std::sqrt(law.squared[pick(rng)]);
    }
    return out;
  }
  if (law.kind == LawKind::MarchenkoPastur)
    throw Error(ErrorKind::Configuration, "Marchenko-Pastur designs are built from Gaussian entries");
  if (!law.normalized()) throw Error(ErrorKind::Configuration, "spectral law is not normalized");
  const double scale = law.c * (law.delta > 1 ? std::sqrt(law.delta) : 1.0);
  std::uniform_real_distribution<double> unif(1.0, 2.0);
  for (int i = 0; i < count; ++i) {
    double u = law.kind == LawKind::ScaledBeta ? sample_beta(law.a, law.b, rng) : unif(rng);
    out[i] = scale * u;
  }
  return out;
}

Vec singular_values(const Mat& X) {
  Eigen::BDCSVD<Mat> svd(X);
  return svd.singularValues();
}

namespace {

void thin_svd(Design& D) {
  Eigen::BDCSVD<Mat> svd(D.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  D.sv = svd.singularValues();
  D.U = svd.matrixU();
  D.V = svd.matrixV();
  D.hasFactors = true;
}

}  // namespace

Design build_design(int n, int d, const SpectralLaw& law, Rng& rng, bool withFactors) {
  if (n < 2 || d < 2) throw Error(ErrorKind::InvalidDimension, "design needs n, d >= 2");
  Design D;
  D.n = n;
  D.d = d;
  const int m = std::min(n, d);
  if (law.kind == LawKind::MarchenkoPastur) {
    D.kind = DesignKind::RawMatrix;
    D.X = gaussian_matrix(n, d, 1.0 / std::sqrt(static_cast<double>(d)), rng);
    if (withFactors)
      thin_svd(D);
    else
      D.sv = singular_values(D.X);
    return D;
  }
  D.kind = DesignKind::HaarSvd;
  std::vector<double> lam = sample_spectrum(law, m, rng);
  std::stable_sort(lam.begin(), lam.end(), std::greater<double>());
  D.sv = Eigen::Map<Vec>(lam.data(), m);
  D.U = sample_haar_columns(n, m, rng);
  D.V = sample_haar_columns(d, m, rng);
  D.X = D.U * D.sv.asDiagonal() * D.V.transpose();
  D.hasFactors = true;
  if (!withFactors) {
    D.U.resize(0, 0);
    D.V.resize(0, 0);
    D.hasFactors = false;
  }
  return D;
}

Mat dct_matrix(int d) {
  Mat C(d, d);
  for (int k = 0; k < d; ++k) {
    double alpha = k == 0 ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d);
    for (int j = 0; j < d; ++j) C(k, j) = alpha * std::cos(kPi * (2 * j + 1) * k / (2.0 * d));
  }
  return C;
}

Design build_cdp_design(int d, int delta, CdpVariant variant, Rng& rng,
                        const std::optional<std::vector<Vec>>& forcedDiagonals) {
  if (delta < 1) throw Error(ErrorKind::InvalidDimension, "CDP needs an integer delta >= 1");
  if (d < 2) throw Error(ErrorKind::InvalidDimension, "CDP needs d >= 2");
  std::vector<Vec> diags;
  if (forcedDiagonals) {
    diags = *forcedDiagonals;
    if (static_cast<int>(diags.size()) != delta)
      throw Error(ErrorKind::InvalidDimension, "forced diagonals must have delta entries");
  } else {
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < delta; ++i) {
      Vec Di(d);
      for (int k = 0; k < d; ++k) {
        if (variant == CdpVariant::Binary) {
          Di[k] = coin(rng) ? 1.0 : 0.0;
        } else {
          bool zero = coin(rng);
          bool plus = coin(rng);
          Di[k] = zero ? 0.0 : (plus ? 1.0 : -1.0);
        }
      }
      diags.push_back(std::move(Di));
    }
  }
  Design D;
  D.kind = variant == CdpVariant::Binary ? DesignKind::CdpBinary : DesignKind::CdpTernary;
  D.n = d * delta;
  D.d = d;
  Mat Ct = dct_matrix(d).transpose();
  D.X.resize(D.n, d);
  Vec sq = Vec::Zero(d);
  for (int i = 0; i < delta; ++i) {
    D.X.block(i * d, 0, d, d) = Ct * diags[i].asDiagonal();
    sq += diags[i].cwiseAbs2();
  }
  std::vector<int> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sq[a] > sq[b]; });
  D.sv.resize(d);
  D.U = Mat::Zero(D.n, d);
  D.V = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    int k = order[j];
    D.sv[j] = std::sqrt(sq[k]);
    D.V(k, j) = 1.0;
    if (D.sv[j] > 0) D.U.col(j) = D.X.col(k) / D.sv[j];
  }
  D.hasFactors = true;
  return D;
}

}  // namespace glmamp
