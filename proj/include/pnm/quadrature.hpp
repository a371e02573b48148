// Gauss-Legendre rules (nodes and weights on [-1, 1]).
#pragma once

#include <utility>
#include <vector>

namespace pnm {

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Cached per order; safe to call concurrently.
const GaussRule& gauss_legendre(int n);

// Rule mapped to [a, b].
GaussRule gauss_legendre(int n, double a, double b);

// Golden-section minimization of f on [a, b] to absolute tolerance tol.
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, double tol = 1e-12) {
  const double g = 0.6180339887498949;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace pnm
