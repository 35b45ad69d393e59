#pragma once

#include <functional>
#include <vector>

namespace glmamp {

// Nodes and weights; weights already include the measure, so E[f] = sum w_i f(x_i).
struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

// Gauss-Legendre on [a, b] (weights sum to b - a).
Rule gauss_legendre(int n, double a, double b);

// Probabilists' Gauss-Hermite for N(0, 1); weights sum to 1.
Rule gauss_hermite(int n);

// Bracketed root of a continuous function with f(lo) f(hi) <= 0. Absolute x tolerance.
double find_root(const std::function<double(double)>& f, double lo, double hi, double xtol = 1e-12,
                 int maxIter = 500);

// Expand [lo, hi] geometrically towards `direction` (+1 grows hi, -1 shrinks lo) until the
// sign changes; returns false when the cap is hit.
bool expand_bracket(const std::function<double(double)>& f, double& lo, double& hi, int direction,
                    double cap);

}  // namespace glmamp
