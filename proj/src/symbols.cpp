#include "pnm/symbols.hpp"

#include <algorithm>
#include <cmath>

namespace pnm {

namespace {

void require_nonzero(Vec2 k) {
  if (!std::isfinite(k.a) || !std::isfinite(k.b)) throw InvalidInput("non-finite frequency");
  if (k.a == 0.0 && k.b == 0.0) throw InvalidInput("symbol evaluated at the zero frequency");
}

}  // namespace

std::pair<double, double> roots_r(const DerivedPerp& dp, Vec2 k) {
  require_nonzero(k);
  return {std::sqrt(k.a * k.a + k.b * k.b / dp.delta), k.norm()};
}

DtnMatrix dtn_perp(const DerivedPerp& dp, Vec2 k) {
  auto [r1, r2] = roots_r(dp, k);
  const double nu = dp.nu, d = dp.delta, k1 = k.a, k3 = k.b;
  const double r1s = r1 * r1;
  const double pre = 2.0 * dp.mu / (1.0 - nu) * r1;
  const double w = nu * d + (1.0 - nu) * (1.0 - d);
  const double z = nu * d * d - (1.0 - nu) * (1.0 - d) * (1.0 - d);
  DtnMatrix A;
  A(0, 0) = (dp.p * k1 * k1 + (1.0 - nu) * k3 * k3) / r1s;
  A(0, 1) = d * nu * k1 * k3 / r1s;
  A(1, 0) = k1 * k3 / (d * r1s) * (w * r2 + z * r1) / (r1 + r2);
  A(1, 1) = (r1 * r2 - nu * k1 * k1) / r1s;
  return pre * A;
}

DtnMatrix dtn_parallel(const DerivedParallel& dpar, Vec2 k) {
  require_nonzero(k);
  const double n = k.norm();
  Eigen::Vector2d e(k.a / n, k.b / n);
  return dpar.eta1 * n * DtnMatrix::Identity() + (dpar.eta2 - dpar.eta1) * n * e * e.transpose();
}

double symbol_case1(const DerivedPerp& dp, Vec2 k) {
  auto [r1, r2] = roots_r(dp, k);
  const double k1s = k.a * k.a, k3s = k.b * k.b;
  return 2.0 * dp.mu * r2 * (dp.p * k1s + k3s) / (r1 * r2 - dp.nu * k1s);
}

double symbol_case2(const DerivedPerp& dp, Vec2 k) {
  require_nonzero(k);
  const double k1s = k.a * k.a, k3s = k.b * k.b;
  return 2.0 * dp.mu * k.norm() * (dp.p * k1s + k3s) / (dp.p * k1s + dp.q * k3s);
}

double symbol_case3(const DerivedParallel& dpar, Vec2 k) {
  require_nonzero(k);
  const double n = k.norm();
  return dpar.eta1 * dpar.eta2 * n * n * n / (dpar.eta2 * k.a * k.a + dpar.eta1 * k.b * k.b);
}

double symbol_case1_from_matrix(const DerivedPerp& dp, Vec2 k) {
  DtnMatrix A = dtn_perp(dp, k);
  return A.determinant() / A(1, 1);
}

double symbol_case2_from_matrix(const DerivedPerp& dp, Vec2 k) {
  DtnMatrix A = dtn_perp(dp, k);
  return A.determinant() / A(0, 0);
}

double symbol_case3_from_matrix(const DerivedParallel& dpar, Vec2 k) {
  DtnMatrix A = dtn_parallel(dpar, k);
  return A.determinant() / A(0, 0);
}

double symbol_upper_constant(const DerivedPerp& dp, CaseId id, int n_theta) {
  double best = 0.0;
  for (int i = 0; i < n_theta; ++i) {
    const double t = kPi * i / n_theta;
    Vec2 k{std::cos(t), std::sin(t)};
    const double m = id == CaseId::CaseI ? symbol_case1(dp, k) : symbol_case2(dp, k);
    best = std::max(best, m / dp.mu);
  }
  return best;
}

ModelCase make_case(CaseId id, const ElasticConstants& ec) {
  ModelCase mc;
  mc.id = id;
  if (id == CaseId::CaseIII) {
    mc.parallel = derive_parallel(ec);
  } else {
    mc.perp = derive_perp(ec);
  }
  return mc;
}

double eval_symbol(const ModelCase& mc, Vec2 k) {
  switch (mc.id) {
    case CaseId::CaseI: return symbol_case1(mc.perp, k);
    case CaseId::CaseII: return symbol_case2(mc.perp, k);
    case CaseId::CaseIII: return symbol_case3(mc.parallel, k);
  }
  return 0.0;
}

SymbolFn make_symbol(const ModelCase& mc) {
  return [mc](double k1, double k2) { return eval_symbol(mc, {k1, k2}); };
}

SymbolFn half_laplacian_symbol(double rho) {
  if (!(rho > 0.0)) throw InvalidInput("half-Laplacian anisotropy rho must be positive");
  return [rho](double k1, double k2) { return std::sqrt(k1 * k1 + rho * k2 * k2); };
}

}  // namespace pnm
