#include "pnm/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_integration.h>

namespace pnm {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto& slot = cache[n];
  if (!slot) {
    auto rule = std::make_unique<GaussRule>();
    gsl_integration_glfixed_table* t = gsl_integration_glfixed_table_alloc(n);
    rule->x.resize(n);
    rule->w.resize(n);
    for (int i = 0; i < n; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &rule->x[i], &rule->w[i], t);
    gsl_integration_glfixed_table_free(t);
    slot = std::move(rule);
  }
  return *slot;
}

GaussRule gauss_legendre(int n, double a, double b) {
  const GaussRule& ref = gauss_legendre(n);
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double h = 0.5 * (b - a), m = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.x[i] = m + h * ref.x[i];
    r.w[i] = h * ref.w[i];
  }
  return r;
}

}  // namespace pnm
