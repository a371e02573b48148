#include <random>

#include "doctest.h"
#include "pnm/moduli.hpp"

using namespace pnm;
using doctest::Approx;

TEST_CASE("validate: ellipticity conditions") {
  CHECK(validate({3, 1, 3, 1, 1}).valid);

  const auto shear = validate({1, 1, 3, 1, 1});
  CHECK_FALSE(shear.valid);
  CHECK_FALSE(shear.shear_ok);

  const auto coupling = validate({3, 3, 3, 1, 1});
  CHECK_FALSE(coupling.valid);
  CHECK(coupling.shear_ok);
  CHECK_FALSE(coupling.coupling_ok);

  const auto nonfinite = validate({std::nan(""), 1, 3, 1, 1});
  CHECK_FALSE(nonfinite.valid);
  CHECK_FALSE(nonfinite.diagnostic.empty());

  CHECK_THROWS_AS(make_constants(3, 3, 3, 1, 1), ValidationError);
  CHECK_THROWS_AS(make_constants(INFINITY, 1, 3, 1, 1), InvalidInput);
}

TEST_CASE("from_isotropic") {
  const auto a = from_isotropic(1, 0.25);
  CHECK(a.c11 == Approx(3));
  CHECK(a.c13 == Approx(1));
  CHECK(a.c33 == Approx(3));
  CHECK(a.c44 == Approx(1));
  CHECK(a.c66 == Approx(1));

  const auto b = from_isotropic(2, 0);
  CHECK(b.c11 == Approx(4));
  CHECK(b.c13 == Approx(0));
  CHECK(b.c44 == Approx(2));

  CHECK_THROWS_AS(from_isotropic(1, 0.5), InvalidInput);
}

TEST_CASE("validity of isotropic constants matches the (mu, nu) range") {
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 25; ++j) {
      const double mu = -0.5 + 2.0 * i / 39.0;
      const double nu = -1.5 + 2.2 * j / 24.0;
      if (std::abs(nu - 0.5) < 1e-12) continue;
      const bool expected = mu > 0 && nu > -1 && nu < 0.5;
      CHECK(validate(from_isotropic(mu, nu)).valid == expected);
    }
}

TEST_CASE("special condition") {
  auto s = check_special_condition({3, 1, 3, 1, 1});
  CHECK(s.cond_root);
  CHECK(s.cond_equal);
  s = check_special_condition({4, 1, 4, 1, 1});
  CHECK_FALSE(s.cond_root);
  CHECK(s.cond_equal);
  s = check_special_condition({3, 1, 4, 1, 1});
  CHECK_FALSE(s.cond_root);
  CHECK_FALSE(s.cond_equal);
  // Unit invariance: scaling all constants does not change the outcome.
  CHECK(check_special_condition({3e9, 1e9, 3e9, 1e9, 1e9}).both());
}

TEST_CASE("derive_perp") {
  const auto d = derive_perp({3, 1, 3, 1, 1});
  CHECK(d.mu == Approx(1));
  CHECK(d.nu == Approx(0.25));
  CHECK(d.delta == Approx(1));
  CHECK(d.p == Approx(1));
  CHECK(d.q == Approx(0.75));
  CHECK(d.b == Approx(2));
  CHECK(d.c == Approx(0.9375));

  const auto e = derive_perp({3, 1, 3, 1, 2});
  CHECK(e.delta == Approx(2));
  CHECK(e.p == Approx(1));
  CHECK(e.q == Approx(0.75));

  CHECK_THROWS_AS(derive_perp({4, 1, 4, 1, 1}), ValidationError);
}

TEST_CASE("derive_perp round trip from isotropic constants") {
  for (double mu : {0.5, 1.0, 3.0})
    for (double nu : {-0.9, -0.3, 0.0, 0.2, 0.45}) {
      const auto d = derive_perp(from_isotropic(mu, nu));
      CHECK(d.mu == Approx(mu).epsilon(1e-12));
      CHECK(d.nu == Approx(nu).epsilon(1e-12).scale(1));
      CHECK(d.delta == Approx(1).epsilon(1e-12));
      CHECK(d.p == Approx(1).epsilon(1e-12));
      CHECK(d.q == Approx(1 - nu).epsilon(1e-12));
    }
}

TEST_CASE("perp parameters stay in range on the admissible strip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  int count = 0;
  while (count < 2000) {
    const double delta = 4.0 * U(rng), nu = -1.0 + 1.5 * U(rng);
    if (!perp_elliptic(nu, delta) || delta <= 0) continue;
    ++count;
    const auto ec = from_perp(1.0, nu, delta);
    REQUIRE(validate(ec).valid);
    const auto d = derive_perp(ec);
    CHECK(d.p > 0);
    CHECK(d.p <= 4 + 1e-12);
    CHECK(d.q > 0.5);
  }
}

TEST_CASE("derive_parallel") {
  const auto d = derive_parallel({3, 1, 3, 1, 1});
  CHECK(d.eta1 == Approx(2).epsilon(1e-12));
  CHECK(d.eta2 == Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK(d.eta1 / d.eta2 == Approx(0.75).epsilon(1e-12));
  CHECK(d.eta2_positive);

  const auto e = derive_parallel({4, 0, 4, 2, 2});
  CHECK(e.eta1 == Approx(4).epsilon(1e-12));
  CHECK(e.eta1 / e.eta2 == Approx(1).epsilon(1e-12));

  // Isotropy gives the repeated root theta2 = theta3.
  CHECK(std::abs(d.theta2 - d.theta3) < 1e-7);
  CHECK(d.theta1.real() == Approx(std::sqrt(d.delta_ratio)));

  for (double nu : {-0.6, 0.0, 0.3, 0.45}) {
    const auto p = derive_parallel(from_isotropic(1.0, nu));
    CHECK(p.eta1 / p.eta2 == Approx(1 - nu).epsilon(1e-10));
  }
}
