// One-dimensional profile solver for the reduced scalar nonlocal equation
//   L u = -W'(u),  u(x) = psi(e . x),
// which reduces to (-Delta)^(1/2) psi = -W'(psi) / m(e) on the line, together
// with a stability check of the linearization and 2D reconstruction.
#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "pnm/common.hpp"
#include "pnm/kernels.hpp"
#include "pnm/nonlocal.hpp"
#include "pnm/symbols.hpp"

namespace pnm {

// Potential with wells at +-1: W(+-1) = 0, W > 0 on (-1, 1), W''(+-1) > 0.
class Potential {
 public:
  enum class Kind { PeriodicCosine, QuarticDoubleWell, Table };

  // scale * (1 + cos(pi u)).
  static Potential periodic_cosine(double scale);
  // scale * (1 - u^2)^2.
  static Potential quartic(double scale);
  // Natural cubic spline through (u_i, W_i); the nodes must cover [-1, 1].
  // Outside the nodes W is continued by its second-order Taylor polynomial.
  static Potential table(const std::vector<double>& u, const std::vector<double>& w);
  // The cosine potential (m/pi^2)(1 + cos(pi u)) whose 1D profile is
  // (2/pi) arctan(x) exactly when the symbol value on e is m.
  static Potential arctan_oracle(double m_e) { return periodic_cosine(m_e / (kPi * kPi)); }

  Kind kind() const { return kind_; }
  double scale() const { return scale_; }
  std::string name() const;

  double W(double u) const;
  double dW(double u) const;
  double d2W(double u) const;
  double d3W(double u) const;

  // sup over [-1, 1] of |W| + |W'| + |W''| + |W'''|, sampled.
  double derivative_bound() const;
  // sup over [-1, 1] of |W''|, sampled (closed form for the analytic kinds).
  double max_abs_d2W() const;

 private:
  struct Spline;
  Potential() = default;
  void check() const;

  Kind kind_ = Kind::PeriodicCosine;
  double scale_ = 1.0;
  std::shared_ptr<const Spline> spline_;
};

enum class SolveMethod { GradientFlow, Newton };

struct ProfileOptions {
  double X = 200.0;     // half-width of the periodic computational interval
  int N = 4096;         // grid points (power of two)
  SolveMethod method = SolveMethod::Newton;
  double tol = 1e-10;            // L2 residual tolerance
  double newton_switch = 1e-4;   // gradient-flow residual that activates Newton
  double dt = 0.0;               // 0 selects 0.5 / (max symbol + max|W''|/m)
  int max_flow_steps = 200000;
  int max_newton_steps = 50;
  // Initial guess psi0(x) = phi(init_scale * (x - init_shift)), phi = (2/pi) arctan.
  double init_scale = 1.0;
  double init_shift = 0.0;
};

struct ProfileSolution {
  double X = 0;
  int N = 0;
  std::vector<double> x;    // x_i = -X + i h
  std::vector<double> psi;  // centered profile psi(x_i)
  std::vector<double> v;    // periodic deviation psi - phi((x - shift) / width) before centering
  double shift = 0;         // centre of the analytic background
  double width = 1;         // background width m / W''(+-1); 1 for the arctan oracle
  double center = 0;        // zero crossing of the uncentered profile
  double theta = 0;
  double m_e = 0;
  bool in_region = true;    // kernel-positivity region membership of the case
  double residual = 0;      // L2 residual of the 1D equation
  std::vector<double> history;  // residual after each outer iteration
  int flow_steps = 0;
  int newton_steps = 0;
  double lambda_min = std::numeric_limits<double>::quiet_NaN();

  double h() const { return 2.0 * X / N; }
  // Centered profile at arbitrary x: grid interpolation of the deviation
  // plus the analytic background; beyond the interval the background alone.
  double eval(double s) const;
};

// Solves (-Delta)^(1/2) psi = -W'(psi)/m_e with far field psi(+-inf) = +-1.
// Throws ValidationError if m_e <= 0, ConvergenceError on failure.
ProfileSolution solve_profile_m(double m_e, const Potential& W, const ProfileOptions& opt = {});

// Same with m_e = m(cos theta, sin theta) of the case. Rejects theta outside
// (-pi/2, pi/2) (InvalidInput) and cases outside their positivity region or
// with m_e <= 0 (ValidationError).
ProfileSolution solve_profile(const ModelCase& mc, const Potential& W, double theta, const ProfileOptions& opt = {});

// Whether the case parameters lie in their kernel-positivity region.
bool case_in_region(const ModelCase& mc);

// L2 residual of the 1D equation for a deviation v from phi((x - shift) / width).
double profile_residual(double m_e, const Potential& W, double X, const std::vector<double>& v, double shift = 0.0,
                        double width = 1.0);

struct StabilityReport {
  std::vector<double> eigenvalues;  // smallest eigenvalues, ascending
  double translation_rayleigh = 0;  // Rayleigh quotient of psi'
  bool stable = false;              // lambda_min >= -tol_eig
  int lanczos_steps = 0;
};

// Smallest n_eig eigenvalues of v -> (-Delta)^(1/2) v + W''(psi) v / m_e on
// the grid, by Lanczos with full reorthogonalization. Also stores
// lambda_min into sol.
StabilityReport check_stability(ProfileSolution& sol, const Potential& W, int n_eig = 3, double tol_eig = 1e-4);

struct Reconstruction2D {
  GridField2D u;       // psi(s) on the e-aligned cell [-X, X) x [-L2/2, L2/2)
  double residual = 0; // L2 residual of (L u + W'(u)) / m_e per unit transverse length
};

// Line field u(x) = psi(e . x) on the cell aligned with e, with the 2D symbol
// of the case rotated accordingly; the residual applies the full 2D
// multiplier to the periodic deviation and the analytic background term.
Reconstruction2D reconstruct_2d(const ProfileSolution& sol, const ModelCase& mc, const Potential& W, int N2 = 8);

// Profile file helpers.
std::string profile_csv(const ProfileSolution& sol);

}  // namespace pnm
