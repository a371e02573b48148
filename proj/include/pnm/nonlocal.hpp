// Nonlocal operators on periodic grids: Fourier multipliers, the
// anisotropic half-Laplacian, the singular-kernel quadrature operator, and
// nonlocal energies.
#pragma once

#include <functional>
#include <vector>

#include "pnm/common.hpp"
#include "pnm/kernels.hpp"
#include "pnm/symbols.hpp"

namespace pnm {

// Periodic cell [-L1/2, L1/2) x [-L2/2, L2/2) sampled at N1 x N2 points,
// row-major with the second coordinate contiguous.
struct GridField2D {
  double L1 = 0, L2 = 0;
  int N1 = 0, N2 = 0;
  std::vector<double> v;

  double h1() const { return L1 / N1; }
  double h2() const { return L2 / N2; }
  double x1(int i) const { return -0.5 * L1 + i * h1(); }
  double x2(int j) const { return -0.5 * L2 + j * h2(); }
  double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * N2 + j]; }
  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * N2 + j]; }
};

// Checks N1, N2 are powers of two >= 8 and lengths positive.
GridField2D make_grid(double L1, double L2, int N1, int N2);
GridField2D sample(double L1, double L2, int N1, int N2, const std::function<double(double, double)>& f);

// Spectral application of m(k); the zero mode is mapped to 0.
GridField2D apply_multiplier(const SymbolFn& m, const GridField2D& u);

struct QuadratureOptions {
  double eps = 0.0;    // inner cutoff; 0 selects half the smaller grid step
  double r_cut = 0.0;  // outer cutoff; 0 selects min(L1, L2)/2
  int min_nodes = 48;  // Gauss-Legendre nodes per angular arc (minimum)
  int max_nodes = 2048;
};

// L w(x) = -(1/4 pi) int (w(x-y) + w(x+y) - 2 w(x)) K(y) dy for the
// trigonometric interpolant of w. Polar quadrature in y: Gauss-Legendre in
// the angle on the two arcs delimited by the directions orthogonal to each
// wavevector, exact integration in r over [eps, r_cut] (the radial factor
// of a -3-homogeneous kernel is 1/r^2), a Taylor correction on the inner
// disc, and a far-field-constancy correction for |y| > r_cut.
GridField2D apply_kernel_quadrature(const KernelForm& kf, const GridField2D& u, const QuadratureOptions& opt = {});

// The per-wavevector transfer function realized by apply_kernel_quadrature,
// returned on the r2c layout N1 x (N2/2+1).
std::vector<double> kernel_transfer(const KernelForm& kf, double L1, double L2, int N1, int N2,
                                    const QuadratureOptions& opt = {});

enum class HalfLaplacianMode { Symbol, Integral };

// (-Delta_rho)^(1/2) with symbol sqrt(k1^2 + rho k2^2).
GridField2D aniso_half_laplacian(double rho, const GridField2D& u, HalfLaplacianMode mode,
                                 const QuadratureOptions& opt = {});

double inner_product(const GridField2D& u, const GridField2D& v);  // cell integral of u v

struct EnergyReport {
  double nonlocal = 0;   // nonlocal part of the energy
  double potential = 0;  // integral of W(u)
  double total = 0;
  double radius = 0;     // ball radius for the localized form, 0 for whole cell
  double pair_integral = 0;  // localized form: the double integral of |u(x)-u(y)|^2 K(x-y)
};

// Whole-cell energy 1/2 <L u, u> + int W(u) via Plancherel.
EnergyReport energy(const GridField2D& u, const SymbolFn& m, const std::function<double(double)>& W);

// Localized energy of a line field u(x) = psi(e . x), e = (cos theta, sin theta),
// on the ball B_R centred at the origin. The pair integral runs over
// (R^2 x R^2) minus (B_R^c x B_R^c); the nonlocal part is pair_integral/(8 pi),
// which matches the normalization 1/2 <L u, u> of the operator.
struct LineEnergyOptions {
  int s_nodes = 16;       // Gauss-Legendre nodes per panel across the line
  int t_nodes = 24;       // nodes along the line
  int n_omega = 128;      // trapezoid nodes for the direction omega
  int r_nodes = 24;       // nodes per radial panel
  double core = 1.0;      // length scale of the profile core
};
EnergyReport localized_energy_line(const std::function<double(double)>& psi, double theta, const KernelForm& kf,
                                   double R, const std::function<double(double)>& W,
                                   const LineEnergyOptions& opt = {});

}  // namespace pnm
