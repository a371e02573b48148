#include <random>

#include "doctest.h"
#include "pnm/kernels.hpp"
#include "pnm/regions.hpp"

using namespace pnm;
using doctest::Approx;

namespace {

double K(const KernelForm& kf, double a, double b) { return eval_kernel(kf, {a, b}); }

}  // namespace

TEST_CASE("isotropic kernel values") {
  const auto kf = build_kernel_isotropic(1, 0.75);
  CHECK(K(kf, 1, 0) == Approx(3).epsilon(1e-14));
  CHECK(K(kf, 0, 1) == Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(K(kf, 0.6, -2.2) == Approx(K(kf, 0.3, -1.1) / 8).epsilon(1e-14));
  CHECK_THROWS_AS(K(kf, 0, 0), InvalidInput);
}

TEST_CASE("evenness and -3 homogeneity of every kernel") {
  const std::vector<KernelForm> forms = {
      build_kernel_case1(make_perp(1, 0.1, 1.7)), build_kernel_case2(make_perp(1.2, -0.3, 0.8)),
      build_kernel_case3(2.0, 2.5), build_kernel_isotropic(1, 0.9), build_kernel_half_laplacian(2.0)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-2, 2), S(0.1, 10);
  for (const auto& kf : forms)
    for (int n = 0; n < 200; ++n) {
      const double a = U(rng), b = U(rng), s = S(rng);
      if (std::hypot(a, b) < 1e-3) continue;
      const double v = K(kf, a, b);
      CHECK(K(kf, -a, -b) == Approx(v).epsilon(1e-13));
      CHECK(K(kf, s * a, s * b) == Approx(v / (s * s * s)).epsilon(1e-12));
    }
}

TEST_CASE("collapse to the isotropic kernel at delta = 1") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> T(0, 2 * kPi);
  for (double nu : {-0.3, 0.1, 0.25, 0.4}) {
    const auto iso = build_kernel_isotropic(1, 1 - nu);
    const auto k1 = build_kernel_case1(make_perp(1, nu, 1));
    const auto k2 = build_kernel_case2(make_perp(1, nu, 1));
    for (int n = 0; n < 250; ++n) {
      const double t = T(rng), c = std::cos(t), s = std::sin(t);
      // Case I in (z1, z3) directly; case II after swapping the axes.
      CHECK(K(k1, c, s) == Approx(K(iso, c, s)).epsilon(1e-10));
      CHECK(K(k2, s, c) == Approx(K(iso, c, s)).epsilon(1e-10));
    }
  }
  CHECK(K(build_kernel_case1(make_perp(1, 0.25, 1)), 1, 0) == Approx(3).epsilon(1e-12));
}

TEST_CASE("case III kernel equals case II with mu = eta1/2, p = 1, q = eta1/eta2") {
  DerivedPerp dp;
  dp.mu = 1;
  dp.delta = 1;
  dp.p = 1;
  dp.q = 0.8;
  const auto k3 = build_kernel_case3(2.0, 2.5);
  const auto k2 = build_kernel_case2(dp);
  for (double t = 0.05; t < kPi; t += 0.1)
    CHECK(K(k3, std::cos(t), std::sin(t)) == Approx(K(k2, std::cos(t), std::sin(t))).epsilon(1e-12));
}

TEST_CASE("case I axis values are proportional to the closed forms") {
  for (auto [nu, delta] : {std::pair{0.2, 1.5}, std::pair{-0.3, 0.7}, std::pair{0.4, 3.0}}) {
    const auto kf = build_kernel_case1(make_perp(1, nu, delta));
    const double k10 = std::pow(delta, 1.5) * (3 - 4 * nu) + std::pow(delta, 2.5) * (4 * nu - 2) + 2 * delta * nu;
    const double k01 = delta * (nu * (-2 * delta * nu + delta + 2 * nu - 4) + 1) / ((nu - 1) * (nu - 1));
    const double c1 = K(kf, 1, 0) / k10, c2 = K(kf, 0, 1) / k01;
    CHECK(c1 > 0);
    CHECK(c1 == Approx(c2).epsilon(1e-12));
  }
}

TEST_CASE("case I kernel at the degenerate Poisson ratio nu = -1") {
  // Individual parts are singular on the x3 axis; the weighted sum has a
  // removable singularity and must be continuous in nu.
  for (double delta : {0.3, 0.6}) {
    const auto k0 = build_kernel_case1(make_perp(1, -1.0, delta));
    const auto ke = build_kernel_case1(make_perp(1, -1.0 + 1e-6, delta));
    for (double t : {kPi / 2, kPi / 2 + 1e-3, kPi / 2 + 0.02, 1.0}) {
      const double v0 = K(k0, std::cos(t), std::sin(t)), ve = K(ke, std::cos(t), std::sin(t));
      CHECK(std::isfinite(v0));
      CHECK(v0 == Approx(ve).epsilon(1e-4));
    }
  }
}

TEST_CASE("PDE residuals") {
  CHECK(pde_residual(build_kernel_case2(make_perp(1, 0.2, 1.6)), {1, 1}) <= 1e-8);
  CHECK(pde_residual(build_kernel_case3(2.0, 2.5), {1, 0.5}) <= 1e-8);
  const auto k1 = build_kernel_case1(make_perp(1, 0.2, 2.3));
  REQUIRE(k1.parts.size() == 2);
  for (int i = 0; i < 100; ++i) {
    const double t = kPi * i / 100.0;
    CHECK(pde_residual(k1, 0, {std::cos(t), std::sin(t)}) <= 1e-6);
    CHECK(pde_residual(k1, 1, {std::cos(t), std::sin(t)}) <= 1e-6);
  }
  CHECK_THROWS_AS(pde_residual(k1, {1e-7, 0}), InvalidInput);
}

TEST_CASE("circle profile and extrema") {
  const auto iso = build_kernel_isotropic(1, 0.75);
  const auto m = circle_min(iso);
  CHECK(m.value == Approx(8.0 / 9.0).epsilon(1e-10));
  CHECK(m.theta == Approx(kPi / 2).epsilon(1e-6));
  CHECK(circle_max(iso).value == Approx(3).epsilon(1e-10));

  // pi-periodicity and symmetry about pi/2.
  const auto prof = circle_profile(build_kernel_isotropic(1, 1.0), 64);
  REQUIRE(prof.size() == 64);
  for (const auto& [t, v] : prof) {
    CHECK(K(build_kernel_isotropic(1, 1.0), std::cos(t + kPi), std::sin(t + kPi)) == Approx(v).epsilon(1e-13));
    CHECK(K(build_kernel_isotropic(1, 1.0), std::cos(kPi - t), std::sin(kPi - t)) == Approx(v).epsilon(1e-13));
  }

  // Case III with ratio in (3/4, 4/3): minimum at an endpoint (ratio 1 gives a
  // constant profile, so it is left out).
  for (double ratio : {0.8, 0.9, 1.1, 1.25}) {
    const auto cm = circle_min(build_kernel_case3(ratio, 1.0));
    const bool endpoint = std::abs(cm.theta) < 1e-6 || std::abs(cm.theta - kPi / 2) < 1e-6 ||
                          std::abs(cm.theta - kPi) < 1e-6;
    CHECK(endpoint);
  }
}

TEST_CASE("isotropic positivity window") {
  for (int i = 0; i < 60; ++i) {
    const double q = 0.3 + 2.7 * i / 59.0;
    if (std::abs(q - 2.0 / 3.0) < 1e-3 || std::abs(q - 1.5) < 1e-3) continue;
    CHECK((circle_min(build_kernel_isotropic(1, q)).value > 0) == (q > 2.0 / 3.0 && q < 1.5));
  }
}

TEST_CASE("kernel minimum sign matches region membership") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0, 1);
  int n = 0;
  while (n < 200) {
    const double nu = -0.95 + 1.4 * U(rng), delta = 0.05 + 3.9 * U(rng);
    if (!perp_elliptic(nu, delta)) continue;
    const auto dp = make_perp(1, nu, delta);
    const double m1 = circle_min(build_kernel_case1(dp)).value;
    const double m2 = circle_min(build_kernel_case2(dp)).value;
    // Skip points too close to a boundary to classify robustly.
    if (std::abs(m1) < 1e-6 || std::abs(m2) < 1e-6) continue;
    ++n;
    CHECK((m1 > 0) == in_region_case1(nu, delta));
    CHECK((m2 > 0) == in_region_case2(nu, delta));
  }
}

TEST_CASE("kernel and closed-form symbol agree") {
  const auto mc = make_case(CaseId::CaseI, from_perp(1, 0.2, 1.5));
  const auto kf = build_kernel(mc);
  for (Vec2 k : {Vec2{1, 0}, Vec2{0, 1}, Vec2{0.6, 0.8}})
    CHECK(symbol_from_kernel(kf, k) == Approx(eval_symbol(mc, k)).epsilon(1e-8));
}
