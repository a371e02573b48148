#include "pnm/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pnm/quadrature.hpp"

namespace pnm {

namespace {

using ld = long double;

// |z|^-3 second derivatives: d_i^2 |z|^-3 = 3 (5 z_i^2 - |z|^2) / |z|^7.
ld d2_inv_cube(ld zi2, ld r2) { return 3.0L * (5.0L * zi2 - r2) / std::pow(r2, 3.5L); }

void add_critical(std::vector<double>& out, double zeta2) {
  if (!(zeta2 >= 0.0 && zeta2 <= 1.0)) return;
  out.push_back(std::acos(std::sqrt(zeta2)));
}

}  // namespace

KernelForm build_kernel_case1(const DerivedPerp& dp) {
  const double d = dp.delta, p = dp.p, b = dp.b, c = dp.c, mu = dp.mu, nu = dp.nu;
  if (!perp_elliptic(nu, d) || !(mu > 0.0)) throw InvalidInput("case I kernel: parameters outside the ellipticity strip");

  RationalPart k1;
  k1.name = "K1";
  k1.weight = 2.0 * mu * d * std::sqrt(d);
  const double A = (-2 * b + d + 2 * p + 2) / d;
  const double B = 3 * (2 * b * b - 2 * b * (d + p + 1) - 4 * c + 3 * d + 3 * d * p + 4 * p) / d;
  const double C = (9 * b * b * d + 6 * c * (3 * b - 5 * d - 4 * p - 4) - 6 * b * (d * d + d + d * p - p) +
                    3 * d * (2 * d + 2 * d * p + 11 * p)) / d;
  const double D = (b * b * (d * (2 * d + 1) + (d + 2) * p) - 2 * b * (c * (-13 * d + p + 1) + d * (d + (d - 13) * p))) / d +
                   (20 * c * c - 2 * c * (d * (10 * d + 23) + (23 * d + 10) * p) + 20 * d * d * p) / d;
  const double E = (-6 * c * (b * (-d * d + d + d * p + p) + d * (4 * d + 4 * d * p + 5 * p)) + 9 * b * d * p * (b + 2 * d) +
                    c * c * (33 * d + 6 * p + 6)) / d;
  const double F = 6 * b * b * d * p - 6 * c * (b * (d + d * p + p) + 2 * d * p) + 3 * c * c * (4 * d + 3 * p + 3);
  const double G = c * (c * (2 * d + 2 * d * p + p) - 2 * b * d * p);
  k1.num = {{A, B, C, D, E, F, G}};
  k1.aniso_w = d;
  k1.aniso_pow = 1.5;
  k1.quad = {{1.0, b, c}};
  k1.quad_pow = 3;
  k1.op = {{c, b, 1.0}};
  const ld d1 = 8 * p - 2 * d * (1 + p) + d * d;
  const ld d2 = d * (-12 * p + 17 * (1 + p) * d - 12 * d * d);
  const ld d3 = d * d * (p - 2 * d * (1 + p) + 8 * d * d);
  const ld dl = d;
  k1.rhs = [=](ld x1, ld x3) {
    const ld X = x1 * x1, Y = x3 * x3;
    return 45.0L * (d1 * X * X + d2 * X * Y + d3 * Y * Y) / std::pow(X + dl * Y, 5.5L);
  };

  RationalPart k2;
  k2.name = "K2";
  k2.weight = 2.0 * mu * d * nu;
  const double B2 = -6 * b + 12 * p + 9;
  const double C2 = 6 * b * (p - 1) - 24 * c + 33 * p + 6;
  const double D2 = b * b - 2 * b * (c + 1) + 2 * (b + 13) * b * p - 20 * c * p - 46 * c + 20 * p;
  const double E2 = -6 * c * ((b + 5) * p + b + 4) + 9 * b * (b + 2) * p + 6 * c * c;
  const double F2 = 6 * b * b * p - 6 * b * c * (p + 1) + 3 * c * (3 * c - 4 * p);
  const double G2 = c * (c * (p + 2) - 2 * b * p);
  k2.num = {{2.0, B2, C2, D2, E2, F2, G2}};
  k2.aniso_w = 1.0;
  k2.aniso_pow = 1.5;
  k2.quad = {{1.0, b, c}};
  k2.quad_pow = 3;
  k2.op = {{c, b, 1.0}};
  const ld pl = p;
  k2.rhs = [=](ld x1, ld x3) {
    const ld X = x1 * x1, Y = x3 * x3;
    return 45.0L * ((8 * pl - 2) * X * X + (17 - 12 * pl) * X * Y + (pl - 2) * Y * Y) / std::pow(X + Y, 5.5L);
  };

  KernelForm kf;
  kf.label = "case I";
  kf.parts = {k1, k2};
  return kf;
}

KernelForm build_kernel_case2(const DerivedPerp& dp) {
  const double p = dp.p, q = dp.q, mu = dp.mu;
  if (!(p > 0.0) || !(q > 0.0) || !(mu > 0.0)) throw InvalidInput("case II kernel: requires p > 0, q > 0, mu > 0");
  RationalPart k;
  k.name = "K";
  k.weight = 2.0 * mu;
  k.num = {{2 * p * q * q - 2 * p * q + q * q, -6 * p * p * q + 6 * p * p + 9 * p * q * q - 6 * p * q,
            -6 * p * p * q + 9 * p * p + 6 * p * q * q - 6 * p * q, p * p * p - 2 * p * p * q + 2 * p * p}};
  k.aniso_w = 1.0;
  k.aniso_pow = 1.5;
  k.quad = {{q, p}};
  k.quad_pow = 3;
  k.op = {{p, q}};
  const ld pl = p;
  k.rhs = [=](ld z1, ld z3) {
    const ld r2 = z1 * z1 + z3 * z3;
    return pl * d2_inv_cube(z1 * z1, r2) + d2_inv_cube(z3 * z3, r2);
  };
  KernelForm kf;
  kf.label = "case II";
  kf.parts = {k};
  if (p != q) {
    const double disc = std::sqrt((p - q) * (p - q) * (p * p + q * q));
    const double base = 2 * q * q - p * q - p * p;
    if (p <= 0.75 * q) add_critical(kf.critical_angles, (base - disc) / ((p - q) * (p - q)));
    if (p >= 4.0 * q / 3.0) add_critical(kf.critical_angles, (base + disc) / ((p - q) * (p - q)));
  }
  return kf;
}

KernelForm build_kernel_case3(double eta1, double eta2) {
  if (!(eta1 > 0.0) || !(eta2 > 0.0)) throw InvalidInput("case III kernel: requires eta1 > 0 and eta2 > 0");
  RationalPart k;
  k.name = "K";
  k.weight = eta1 * eta2;
  k.num = {{3 * eta1 * eta1 - 2 * eta1 * eta2, 2 * (3 * eta1 * eta1 - 5 * eta1 * eta2 + 3 * eta2 * eta2),
            3 * eta2 * eta2 - 2 * eta1 * eta2}};
  k.aniso_w = 1.0;
  k.aniso_pow = 0.5;
  k.quad = {{eta1, eta2}};
  k.quad_pow = 3;
  k.op = {{eta2, eta1}};
  k.rhs = [](ld z1, ld z2) { return 9.0L / std::pow(z1 * z1 + z2 * z2, 2.5L); };
  KernelForm kf;
  kf.label = "case III";
  kf.parts = {k};
  const double ell = eta1 / eta2;
  if (ell != 1.0) add_critical(kf.critical_angles, (1 + 2 * ell - 2 * std::sqrt(1 + ell * ell)) / (ell - 1));
  return kf;
}

KernelForm build_kernel_isotropic(double mu, double q) {
  if (!(mu > 0.0) || !(q > 0.0)) throw InvalidInput("isotropic kernel: requires mu > 0 and q > 0");
  RationalPart k;
  k.name = "K";
  k.weight = 2.0 * mu;
  k.num = {{3 - 2 * q, 2 * (3 * q * q - 5 * q + 3), q * (3 * q - 2)}};
  k.aniso_w = 1.0;
  k.aniso_pow = 0.5;
  k.quad = {{1.0, q}};
  k.quad_pow = 3;
  k.op = {{q, 1.0}};
  k.rhs = [](ld z1, ld z3) { return 9.0L / std::pow(z1 * z1 + z3 * z3, 2.5L); };
  KernelForm kf;
  kf.label = "isotropic";
  kf.parts = {k};
  return kf;
}

KernelForm build_kernel_half_laplacian(double rho) {
  if (!(rho > 0.0)) throw InvalidInput("half-Laplacian kernel: rho must be positive");
  RationalPart k;
  k.name = "K";
  k.weight = 1.0 / std::sqrt(rho);
  k.num = {{1.0}};
  k.aniso_w = 1.0 / rho;
  k.aniso_pow = 1.5;
  k.quad = {{1.0}};
  k.quad_pow = 0;
  KernelForm kf;
  kf.label = "half-Laplacian";
  kf.parts = {k};
  return kf;
}

KernelForm build_kernel(const ModelCase& mc) {
  switch (mc.id) {
    case CaseId::CaseI: return build_kernel_case1(mc.perp);
    case CaseId::CaseII: return build_kernel_case2(mc.perp);
    case CaseId::CaseIII: return build_kernel_case3(mc.parallel.eta1, mc.parallel.eta2);
  }
  throw InvalidInput("unknown case");
}

namespace {

// Relative size below which a part's quadratic form counts as vanishing.
constexpr double kDegenerateQuad = 1e-4;

// Direction (0: the x1 axis, 1: the x2 axis) near which some part's
// quadratic form Q(x1^2, x2^2) vanishes, or -1. Q can only vanish on the unit
// circle at an axis, and only when its extreme coefficient is (nearly) zero,
// e.g. case I at nu = -1 where c = delta (1 - nu^2) = 0. There the parts
// diverge with opposite signs while their sum stays bounded.
int degenerate_axis(const KernelForm& kf, double X, double Y) {
  const double s2 = (X + Y) * (X + Y);
  for (const auto& p : kf.parts) {
    if (p.quad_pow == 0 || p.quad.c.empty()) continue;
    if (std::abs(p.quad.eval(X, Y)) < kDegenerateQuad * s2) return Y < X ? 0 : 1;
  }
  return -1;
}

}  // namespace

double eval_kernel(const KernelForm& kf, Vec2 x) {
  if (x.a == 0.0 && x.b == 0.0) throw InvalidInput("kernel evaluated at the origin");
  const double X = x.a * x.a, Y = x.b * x.b;
  const int axis = degenerate_axis(kf, X, Y);
  if (axis < 0) return kf.eval(x.a, x.b);
  // The kernel is -3-homogeneous and even in each coordinate, so on the unit
  // circle it is a smooth function of u = phi^2, phi the angle from the
  // degenerate axis. Interpolate in u from well-conditioned directions.
  const double r = std::hypot(x.a, x.b);
  const double phi = axis == 0 ? std::atan2(std::abs(x.b), std::abs(x.a)) : std::atan2(std::abs(x.a), std::abs(x.b));
  constexpr int n = 6;
  constexpr double dphi = 0.04;
  std::array<double, n> u{}, f{};
  for (int j = 0; j < n; ++j) {
    const double a = (j + 1) * dphi;
    u[j] = a * a;
    f[j] = axis == 0 ? kf.eval(std::cos(a), std::sin(a)) : kf.eval(std::sin(a), std::cos(a));
  }
  const double t = phi * phi;
  double val = 0.0;
  for (int j = 0; j < n; ++j) {
    double l = 1.0;
    for (int m = 0; m < n; ++m)
      if (m != j) l *= (t - u[m]) / (u[j] - u[m]);
    val += l * f[j];
  }
  return val / (r * r * r);
}

namespace {

constexpr std::array<ld, 5> kD2 = {-205.0L / 72, 8.0L / 5, -1.0L / 5, 8.0L / 315, -1.0L / 560};
constexpr std::array<ld, 6> kD4 = {1529.0L / 120, -1669.0L / 180, 4369.0L / 1260, -541.0L / 840, 1261.0L / 15120,
                                   -41.0L / 7560};

template <class F>
ld fd_d2(F&& f, ld h) {
  ld s = kD2[0] * f(0);
  for (int j = 1; j <= 4; ++j) s += kD2[j] * (f(j) + f(-j));
  return s / (h * h);
}

template <class F>
ld fd_d4(F&& f, ld h) {
  ld s = kD4[0] * f(0);
  for (int j = 1; j <= 5; ++j) s += kD4[j] * (f(j) + f(-j));
  return s / (h * h * h * h);
}

}  // namespace

double pde_residual(const KernelForm& kf, std::size_t part, Vec2 x, double h_rel) {
  if (part >= kf.parts.size()) throw InvalidInput("kernel part index out of range");
  const RationalPart& rp = kf.parts[part];
  if (rp.op.c.empty() || !rp.rhs) throw InvalidInput("kernel part carries no PDE");
  if (x.norm() < 1e-6) throw InvalidInput("PDE residual requested too close to the origin");
  const ld x1 = x.a, x2 = x.b;
  const ld h = static_cast<ld>(h_rel) * static_cast<ld>(x.norm());
  auto K = [&](ld a, ld b) { return rp.eval_unit<ld>(a, b); };

  std::vector<ld> terms;
  if (rp.op.degree() == 1) {
    const ld t1 = rp.op.c[0] * fd_d2([&](int j) { return K(x1 + j * h, x2); }, h);
    const ld t2 = rp.op.c[1] * fd_d2([&](int j) { return K(x1, x2 + j * h); }, h);
    terms = {t1, t2};
  } else if (rp.op.degree() == 2) {
    const ld t1 = rp.op.c[0] * fd_d4([&](int j) { return K(x1 + j * h, x2); }, h);
    const ld t2 = rp.op.c[1] * fd_d2(
                                   [&](int i) {
                                     return fd_d2([&](int j) { return K(x1 + i * h, x2 + j * h); }, h);
                                   },
                                   h);
    const ld t3 = rp.op.c[2] * fd_d4([&](int j) { return K(x1, x2 + j * h); }, h);
    terms = {t1, t2, t3};
  } else {
    throw InvalidInput("unsupported PDE order");
  }
  ld lhs = 0, scale = 0;
  for (ld t : terms) {
    lhs += t;
    scale += std::abs(t);
  }
  const ld g = rp.rhs(x1, x2);
  return static_cast<double>(std::abs(lhs - g) / (std::abs(g) + 1e-3L * scale));
}

double pde_residual(const KernelForm& kf, Vec2 x, double h_rel) {
  double r = 0.0;
  for (std::size_t i = 0; i < kf.parts.size(); ++i) r = std::max(r, pde_residual(kf, i, x, h_rel));
  return r;
}

std::vector<std::pair<double, double>> circle_profile(const KernelForm& kf, int n_theta) {
  if (n_theta < 8) throw InvalidInput("circle profile needs at least 8 angles");
  std::vector<std::pair<double, double>> out(n_theta);
  for (int i = 0; i < n_theta; ++i) {
    const double t = kPi * i / n_theta;
    out[i] = {t, eval_kernel(kf, {std::cos(t), std::sin(t)})};
  }
  return out;
}

namespace {

// The kernels depend on x1^2 and x2^2 only, so extrema over [0, pi) are
// attained on [0, pi/2].
CircleMin circle_extremum(const KernelForm& kf, double sign) {
  auto f = [&](double t) { return sign * eval_kernel(kf, {std::cos(t), std::sin(t)}); };
  const int n = 2048;
  const double h = 0.5 * kPi / n;
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = f(i * h);

  CircleMin best{0.0, std::numeric_limits<double>::infinity()};
  auto consider = [&](double t, double val) {
    if (val < best.value) best = {t, val};
  };
  consider(0.0, v[0]);
  consider(0.5 * kPi, v[n]);
  for (double t : kf.critical_angles) {
    const double a = std::max(0.0, t - h), b = std::min(0.5 * kPi, t + h);
    auto [tm, fm] = golden_min(f, a, b, 1e-13);
    consider(tm, fm);
  }
  for (int i = 0; i <= n; ++i) {
    const bool left = i == 0 || v[i] <= v[i - 1];
    const bool right = i == n || v[i] <= v[i + 1];
    if (left && right) {
      const double a = std::max(0.0, (i - 1) * h), b = std::min(0.5 * kPi, (i + 1) * h);
      auto [tm, fm] = golden_min(f, a, b, 1e-13);
      consider(tm, fm);
    }
  }
  best.value *= sign;
  return best;
}

}  // namespace

CircleMin circle_min(const KernelForm& kf) { return circle_extremum(kf, 1.0); }

CircleMin circle_max(const KernelForm& kf) { return circle_extremum(kf, -1.0); }

double symbol_from_kernel(const KernelForm& kf, Vec2 k, int n_per_arc) {
  if (k.a == 0.0 && k.b == 0.0) return 0.0;
  // |k . omega| has kinks where omega is orthogonal to k; integrate each arc
  // between consecutive kinks separately.
  const double t0 = std::atan2(k.b, k.a) + 0.5 * kPi;
  double s = 0.0;
  for (int arc = 0; arc < 2; ++arc) {
    GaussRule g = gauss_legendre(n_per_arc, t0 + arc * kPi, t0 + (arc + 1) * kPi);
    for (int i = 0; i < n_per_arc; ++i) {
      const double c = std::cos(g.x[i]), sn = std::sin(g.x[i]);
      s += g.w[i] * eval_kernel(kf, {c, sn}) * std::abs(k.a * c + k.b * sn);
    }
  }
  return 0.25 * s;
}

}  // namespace pnm
