// Closed-form -3-homogeneous kernels of the reduced nonlocal operators,
// verification of their defining PDEs, and circle minima.
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "pnm/common.hpp"
#include "pnm/moduli.hpp"
#include "pnm/symbols.hpp"

namespace pnm {

// Homogeneous polynomial in (X, Y) = (x1^2, x2^2):
//   sum_i c[i] X^(n-i) Y^i,  n = c.size() - 1.
struct BinaryForm {
  std::vector<double> c;

  int degree() const { return static_cast<int>(c.size()) - 1; }

  template <class T>
  T eval(T X, T Y) const {
    // Horner in t = Y/X would divide by zero on the x2 axis; use a direct sum.
    T s = 0;
    const int n = degree();
    for (int i = 0; i <= n; ++i) s += T(c[i]) * ipow(X, n - i) * ipow(Y, i);
    return s;
  }

 private:
  template <class T>
  static T ipow(T v, int e) {
    T r = 1;
    for (int i = 0; i < e; ++i) r *= v;
    return r;
  }
};

// One rational term of a kernel:
//   weight * N(x1^2, x2^2) / ((x1^2 + w x2^2)^e * Q(x1^2, x2^2)^k)
// together with the constant-coefficient PDE it satisfies,
//   op(d1^2, d2^2) [term / weight] = rhs(x1, x2).
struct RationalPart {
  std::string name;
  double weight = 1.0;
  BinaryForm num;
  double aniso_w = 1.0;
  double aniso_pow = 1.5;
  BinaryForm quad;
  int quad_pow = 3;
  BinaryForm op;  // degree 1 (second-order PDE) or 2 (fourth-order PDE)
  std::function<long double(long double, long double)> rhs;

  // Unweighted value of the term.
  template <class T>
  T eval_unit(T x1, T x2) const {
    const T X = x1 * x1, Y = x2 * x2;
    T q = quad.eval(X, Y);
    T qk = 1;
    for (int i = 0; i < quad_pow; ++i) qk *= q;
    using std::pow;
    return num.eval(X, Y) / (pow(X + T(aniso_w) * Y, T(aniso_pow)) * qk);
  }
};

struct KernelForm {
  std::string label;
  std::vector<RationalPart> parts;
  // Closed-form candidates for interior critical angles on [0, pi/2].
  std::vector<double> critical_angles;

  template <class T>
  T eval(T x1, T x2) const {
    T s = 0;
    for (const auto& p : parts) s += T(p.weight) * p.eval_unit(x1, x2);
    return s;
  }
};

// Case I: K = 2 mu delta (sqrt(delta) K1 + nu K2), kept as two weighted parts.
KernelForm build_kernel_case1(const DerivedPerp& dp);
// Case II kernel in variables (z1, z3).
KernelForm build_kernel_case2(const DerivedPerp& dp);
// Case III kernel in variables (z1, z2).
KernelForm build_kernel_case3(double eta1, double eta2);
// Fully isotropic kernel 2 mu (A z1^4 + B z1^2 z3^2 + C z3^4)/(|z| (z1^2 + q z3^2)^3).
KernelForm build_kernel_isotropic(double mu, double q);
// Kernel of the anisotropic half-Laplacian, 1/(sqrt(rho) (y1^2 + y2^2/rho)^(3/2)).
KernelForm build_kernel_half_laplacian(double rho);

KernelForm build_kernel(const ModelCase& mc);

// Throws InvalidInput at the origin.
double eval_kernel(const KernelForm& kf, Vec2 x);

// Relative PDE residual |L K - G| / (|G| + 1e-3 sum|terms|) of part `part`
// at x, using 8th-order central differences in long double with step
// h = h_rel |x|. Throws InvalidInput for |x| < 1e-6.
double pde_residual(const KernelForm& kf, std::size_t part, Vec2 x, double h_rel = 1e-2);
// Maximum over all parts.
double pde_residual(const KernelForm& kf, Vec2 x, double h_rel = 1e-2);

std::vector<std::pair<double, double>> circle_profile(const KernelForm& kf, int n_theta);

struct CircleMin {
  double theta = 0;
  double value = 0;
};

// Minimum of theta -> K(cos theta, sin theta) over [0, pi). Candidates are
// 0, pi/2, closed-form critical angles and local minima of a dense grid,
// each refined by golden-section search.
CircleMin circle_min(const KernelForm& kf);
CircleMin circle_max(const KernelForm& kf);

// Integral over the unit circle of K(omega) |k . omega|, divided by 4; this
// is the Fourier symbol associated with the kernel.
double symbol_from_kernel(const KernelForm& kf, Vec2 k, int n_per_arc = 256);

}  // namespace pnm
