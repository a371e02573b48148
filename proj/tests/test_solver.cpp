#include <algorithm>

#include "doctest.h"
#include "pnm/solver.hpp"

using namespace pnm;
using doctest::Approx;

namespace {

double arctan_profile(double x) { return (2.0 / kPi) * std::atan(x); }

double max_err(const ProfileSolution& s, double scale) {
  double e = 0;
  for (int i = 0; i < s.N; ++i) e = std::max(e, std::abs(s.psi[i] - arctan_profile(scale * s.x[i])));
  return e;
}

}  // namespace

TEST_CASE("potentials") {
  const auto c = Potential::periodic_cosine(0.5);
  CHECK(c.W(1) == Approx(0).scale(1));
  CHECK(c.W(-1) == Approx(0).scale(1));
  CHECK(c.W(0) == Approx(1));
  CHECK(c.d2W(1) == Approx(0.5 * kPi * kPi));
  const auto q = Potential::quartic(2);
  CHECK(q.W(0.5) == Approx(2 * 0.75 * 0.75));
  CHECK(q.dW(0.5) == Approx(-8 * 0.5 * 0.75));
  std::vector<double> u, w;
  // Nodes extend past the wells so that the spline curvature there is resolved.
  for (int i = 0; i <= 60; ++i) {
    u.push_back(-1.5 + i / 20.0);
    w.push_back(q.W(u.back()));
  }
  const auto t = Potential::table(u, w);
  CHECK(t.W(0.33) == Approx(q.W(0.33)).epsilon(1e-3));
  CHECK_THROWS(Potential::table({0, 1}, {1, 0}));
}

TEST_CASE("arctan oracle") {
  for (double m : {0.7, 1.3, 2.5}) {
    const auto s = solve_profile_m(m, Potential::arctan_oracle(m));
    CHECK(s.residual <= 1e-10);
    CHECK(max_err(s, 1.0) <= 1e-3);
  }
  // Gradient flow alone reaches the tolerance as well.
  ProfileOptions o;
  o.method = SolveMethod::GradientFlow;
  o.X = 50;
  o.N = 1024;
  o.init_scale = 0.8;
  o.dt = 0.1;
  const auto g = solve_profile_m(1.0, Potential::arctan_oracle(1.0), o);
  CHECK(g.residual <= 1e-10);
  CHECK(max_err(g, 1.0) <= 1e-3);
}

TEST_CASE("scaling the potential compresses the core") {
  const double m = 1.1;
  for (double lambda : {0.5, 2.0}) {
    const auto W = Potential::periodic_cosine(lambda * m / (kPi * kPi));
    const auto s = solve_profile_m(m, W);
    CHECK(max_err(s, lambda) <= 1e-3);
  }
}

TEST_CASE("isotropic case: directions differ by an x rescaling") {
  const auto mc = make_case(CaseId::CaseII, from_isotropic(1, 0.25));
  const double m0 = eval_symbol(mc, {1, 0}), m1 = eval_symbol(mc, {std::cos(kPi / 4), std::sin(kPi / 4)});
  const auto W = Potential::arctan_oracle(m0);
  const auto s0 = solve_profile(mc, W, 0.0);
  const auto s1 = solve_profile(mc, W, kPi / 4);
  CHECK(max_err(s0, 1.0) <= 1e-3);
  CHECK(max_err(s1, m0 / m1) <= 1e-3);
}

TEST_CASE("monotone, bounded, odd") {
  const double m = 1.3;
  const auto s = solve_profile_m(m, Potential::arctan_oracle(m));
  double odd = 0;
  for (int i = 1; i < s.N; ++i) {
    CHECK(s.psi[i] > s.psi[i - 1]);
    CHECK(std::abs(s.psi[i]) <= 1.0);
    odd = std::max(odd, std::abs(s.psi[i] + s.psi[s.N - i]));
  }
  CHECK(odd <= 1e-10);
  CHECK(s.psi[s.N / 2] == Approx(0).scale(1));

  // Non-oracle cosine and quartic wells converge to monotone profiles too.
  for (const auto& W : {Potential::periodic_cosine(0.3), Potential::quartic(0.4)}) {
    const auto t = solve_profile_m(m, W);
    CHECK(t.residual <= 1e-10);
    for (int i = 1; i < t.N; ++i) CHECK(t.psi[i] > t.psi[i - 1]);
  }
}

TEST_CASE("translation family") {
  const double m = 1.3;
  for (const auto& W : {Potential::arctan_oracle(m), Potential::periodic_cosine(0.5 * m / (kPi * kPi))}) {
    const auto a = solve_profile_m(m, W);
    for (double shift : {0.5, 3.7, -12.3}) {
      ProfileOptions o;
      o.init_shift = shift;
      o.init_scale = 0.7;
      const auto b = solve_profile_m(m, W, o);
      CHECK(b.center == Approx(shift).epsilon(1e-6));
      double d = 0;
      for (int i = 0; i < a.N; ++i) d = std::max(d, std::abs(a.psi[i] - b.psi[i]));
      CHECK(d <= 1e-10);
    }
  }
}

TEST_CASE("invalid inputs") {
  const auto W = Potential::arctan_oracle(1);
  CHECK_THROWS_AS(solve_profile_m(-1, W), ValidationError);
  ProfileOptions o;
  o.N = 1000;
  CHECK_THROWS_AS(solve_profile_m(1, W, o), InvalidInput);
  const auto mc = make_case(CaseId::CaseII, from_isotropic(1, 0.25));
  CHECK_THROWS_AS(solve_profile(mc, W, 2.0), InvalidInput);
  // Case I outside its kernel-positivity region.
  CHECK_THROWS_AS(solve_profile(make_case(CaseId::CaseI, from_isotropic(1, 0.4)), W, 0.0), ValidationError);
  o = {};
  o.max_newton_steps = 0;
  o.max_flow_steps = 3;
  o.init_scale = 0.1;
  CHECK_THROWS_AS(solve_profile_m(1, W, o), ConvergenceError);
}

TEST_CASE("stability of the arctan profile") {
  const double m = 1.3;
  const auto W = Potential::arctan_oracle(m);
  auto s = solve_profile_m(m, W);
  const auto rep = check_stability(s, W, 3);
  REQUIRE(rep.eigenvalues.size() == 3);
  CHECK(std::abs(rep.eigenvalues[0]) <= 1e-4);
  CHECK(std::abs(rep.translation_rayleigh) <= 1e-4);
  CHECK(rep.stable);
  CHECK(rep.eigenvalues[1] > rep.eigenvalues[0]);
  CHECK(s.lambda_min == Approx(rep.eigenvalues[0]));

  // A field that does not solve the equation: psi' is no longer a zero mode.
  auto bad = s;
  for (int i = 0; i < bad.N; ++i) bad.v[i] += 0.3 * std::exp(-bad.x[i] * bad.x[i] / 50.0);
  const auto r2 = check_stability(bad, W, 1);
  CHECK(std::abs(r2.translation_rayleigh) > 1e-3);
}

TEST_CASE("2D reconstruction") {
  const auto mc = make_case(CaseId::CaseI, from_perp(1, 0.2, 1.5));
  const double theta = 0.0;
  const double me = eval_symbol(mc, {1, 0});
  const auto W = Potential::arctan_oracle(me);
  ProfileOptions o;
  o.X = 100;
  o.N = 2048;
  const auto s = solve_profile(mc, W, theta, o);
  const auto rec = reconstruct_2d(s, mc, W);
  for (int i = 0; i < rec.u.N1; ++i)
    for (int j = 1; j < rec.u.N2; ++j) CHECK(rec.u(i, j) == rec.u(i, 0));
  CHECK(rec.residual <= 10 * std::max(s.residual, 1e-12));

  const auto W2 = Potential::arctan_oracle(eval_symbol(mc, {std::cos(0.4), std::sin(0.4)}));
  const auto s2 = solve_profile(mc, W2, 0.4, o);
  const auto rec2 = reconstruct_2d(s2, mc, W2);
  CHECK(rec2.residual <= 10 * std::max(s2.residual, 1e-12));
}

TEST_CASE("profile csv") {
  ProfileOptions o;
  o.X = 20;
  o.N = 64;
  const auto s = solve_profile_m(1, Potential::arctan_oracle(1), o);
  const auto csv = profile_csv(s);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 65);
}
