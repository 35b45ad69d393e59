#include "glmamp/numerics.hpp"

#include "glmamp/common.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <cstdint>
#include <memory>

namespace glmamp {

Rule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorKind::Configuration, "Gauss-Legendre degree must be >= 1");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(static_cast<size_t>(n)), gsl_integration_glfixed_table_free);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(a, b, i, &r.x[i], &r.w[i], table.get());
  return r;
}

Rule gauss_hermite(int n) {
  if (n < 2) throw Error(ErrorKind::Configuration, "Gauss-Hermite degree must be >= 2");
  std::unique_ptr<gsl_integration_fixed_workspace, decltype(&gsl_integration_fixed_free)> ws(
      gsl_integration_fixed_alloc(gsl_integration_fixed_hermite, static_cast<size_t>(n), 0.0, 0.5, 0.0,
                                  0.0),
      gsl_integration_fixed_free);
  const double* nodes = gsl_integration_fixed_nodes(ws.get());
  const double* weights = gsl_integration_fixed_weights(ws.get());
  Rule r;
  r.x.assign(nodes, nodes + n);
  r.w.assign(weights, weights + n);
  double total = 0.0;
  for (double w : r.w) total += w;
  for (double& w : r.w) w /= total;
  return r;
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double xtol, int maxIter) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw Error(ErrorKind::NonConvergence, "root not bracketed on [" + std::to_string(lo) + ", " +
                                               std::to_string(hi) + "]");
  std::uintmax_t iters = static_cast<std::uintmax_t>(maxIter);
  auto tol = [xtol](double a, double b) { return std::abs(b - a) <= xtol; };
  auto res = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (res.first + res.second);
}

bool expand_bracket(const std::function<double(double)>& f, double& lo, double& hi, int direction,
                    double cap) {
  double flo = f(lo), fhi = f(hi);
  while ((flo > 0) == (fhi > 0)) {
    double width = hi - lo;
    if (direction > 0) {
      lo = hi;
      flo = fhi;
      hi = hi + 2 * width;
      if (std::abs(hi) > cap) return false;
      fhi = f(hi);
    } else {
      hi = lo;
      fhi = flo;
      lo = lo - 2 * width;
      if (std::abs(lo) > cap) return false;
      flo = f(lo);
    }
  }
  return true;
}

}  // namespace glmamp
