#include "pnm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <gsl/gsl_spline.h>

#include "pnm/fft.hpp"
#include "pnm/regions.hpp"

namespace pnm {

// ---------------------------------------------------------------------------
// Potential

struct Potential::Spline {
  std::vector<double> u, w;
  gsl_interp* interp = nullptr;

  Spline(std::vector<double> uu, std::vector<double> ww) : u(std::move(uu)), w(std::move(ww)) {
    interp = gsl_interp_alloc(gsl_interp_cspline, u.size());
    gsl_interp_init(interp, u.data(), w.data(), u.size());
  }
  ~Spline() { gsl_interp_free(interp); }
  Spline(const Spline&) = delete;
  Spline& operator=(const Spline&) = delete;

  // Value and first three derivatives at u0, with quadratic continuation
  // beyond the nodes.
  void eval(double x, double out[4]) const {
    const double lo = u.front(), hi = u.back();
    const double xc = std::clamp(x, lo, hi);
    const double f = gsl_interp_eval(interp, u.data(), w.data(), xc, nullptr);
    const double d1 = gsl_interp_eval_deriv(interp, u.data(), w.data(), xc, nullptr);
    const double d2 = gsl_interp_eval_deriv2(interp, u.data(), w.data(), xc, nullptr);
    if (x != xc) {
      const double dx = x - xc;
      out[0] = f + d1 * dx + 0.5 * d2 * dx * dx;
      out[1] = d1 + d2 * dx;
      out[2] = d2;
      out[3] = 0.0;
      return;
    }
    // The spline's third derivative is piecewise constant.
    const std::size_t i = std::min<std::size_t>(gsl_interp_bsearch(u.data(), xc, 0, u.size() - 1), u.size() - 2);
    const double a = gsl_interp_eval_deriv2(interp, u.data(), w.data(), u[i], nullptr);
    const double b = gsl_interp_eval_deriv2(interp, u.data(), w.data(), u[i + 1], nullptr);
    out[0] = f;
    out[1] = d1;
    out[2] = d2;
    out[3] = (b - a) / (u[i + 1] - u[i]);
  }
};

Potential Potential::periodic_cosine(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("potential scale must be positive");
  Potential p;
  p.kind_ = Kind::PeriodicCosine;
  p.scale_ = scale;
  p.check();
  return p;
}

Potential Potential::quartic(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("potential scale must be positive");
  Potential p;
  p.kind_ = Kind::QuarticDoubleWell;
  p.scale_ = scale;
  p.check();
  return p;
}

Potential Potential::table(const std::vector<double>& u, const std::vector<double>& w) {
  if (u.size() != w.size() || u.size() < 4) throw InvalidInput("potential table needs >= 4 (u, W) pairs");
  for (std::size_t i = 0; i + 1 < u.size(); ++i)
    if (!(u[i + 1] > u[i])) throw InvalidInput("potential table nodes must be strictly increasing");
  if (u.front() > -1.0 || u.back() < 1.0) throw InvalidInput("potential table must cover [-1, 1]");
  for (double v : w)
    if (!std::isfinite(v)) throw InvalidInput("potential table values must be finite");
  Potential p;
  p.kind_ = Kind::Table;
  p.scale_ = 1.0;
  p.spline_ = std::make_shared<const Spline>(u, w);
  p.check();
  return p;
}

std::string Potential::name() const {
  switch (kind_) {
    case Kind::PeriodicCosine: return "periodic-cosine";
    case Kind::QuarticDoubleWell: return "quartic";
    case Kind::Table: return "table";
  }
  return "";
}

double Potential::W(double u) const {
  switch (kind_) {
    case Kind::PeriodicCosine: return scale_ * (1.0 + std::cos(kPi * u));
    case Kind::QuarticDoubleWell: return scale_ * (1.0 - u * u) * (1.0 - u * u);
    case Kind::Table: {
      double o[4];
      spline_->eval(u, o);
      return o[0];
    }
  }
  return 0.0;
}

double Potential::dW(double u) const {
  switch (kind_) {
    case Kind::PeriodicCosine: return -scale_ * kPi * std::sin(kPi * u);
    case Kind::QuarticDoubleWell: return -4.0 * scale_ * u * (1.0 - u * u);
    case Kind::Table: {
      double o[4];
      spline_->eval(u, o);
      return o[1];
    }
  }
  return 0.0;
}

double Potential::d2W(double u) const {
  switch (kind_) {
    case Kind::PeriodicCosine: return -scale_ * kPi * kPi * std::cos(kPi * u);
    case Kind::QuarticDoubleWell: return scale_ * (12.0 * u * u - 4.0);
    case Kind::Table: {
      double o[4];
      spline_->eval(u, o);
      return o[2];
    }
  }
  return 0.0;
}

double Potential::d3W(double u) const {
  switch (kind_) {
    case Kind::PeriodicCosine: return scale_ * kPi * kPi * kPi * std::sin(kPi * u);
    case Kind::QuarticDoubleWell: return 24.0 * scale_ * u;
    case Kind::Table: {
      double o[4];
      spline_->eval(u, o);
      return o[3];
    }
  }
  return 0.0;
}

double Potential::derivative_bound() const {
  double s = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double u = -1.0 + i / 1000.0;
    s = std::max(s, std::abs(W(u)) + std::abs(dW(u)) + std::abs(d2W(u)) + std::abs(d3W(u)));
  }
  return s;
}

double Potential::max_abs_d2W() const {
  switch (kind_) {
    case Kind::PeriodicCosine: return scale_ * kPi * kPi;
    case Kind::QuarticDoubleWell: return 8.0 * scale_;
    case Kind::Table: break;
  }
  double s = 0.0;
  for (int i = 0; i <= 2000; ++i) s = std::max(s, std::abs(d2W(-1.0 + i / 1000.0)));
  return s;
}

void Potential::check() const {
  double wmax = 0.0;
  for (int i = 1; i < 200; ++i) wmax = std::max(wmax, W(-1.0 + i / 100.0));
  const double tol = 1e-12 * std::max(1.0, wmax);
  if (std::abs(W(-1.0)) > tol || std::abs(W(1.0)) > tol) throw InvalidInput("potential must vanish at +-1");
  for (int i = 1; i < 200; ++i)
    if (!(W(-1.0 + i / 100.0) > 0.0)) throw InvalidInput("potential must be positive on (-1, 1)");
  if (!(d2W(-1.0) > 0.0) || !(d2W(1.0) > 0.0)) throw InvalidInput("potential wells must be nondegenerate");
}

// ---------------------------------------------------------------------------
// Profile equation on the periodic interval [-X, X)

namespace {

double phi(double x) { return (2.0 / kPi) * std::atan(x); }
// (-Delta)^(1/2) phi, analytic.
double half_lap_phi(double x) { return (2.0 / kPi) * x / (1.0 + x * x); }

// Background phi(y / w) of width w, its derivative and its half-Laplacian.
double bg_value(double y, double w) { return phi(y / w); }
double bg_slope(double y, double w) { return (2.0 / kPi) / (w * (1.0 + (y / w) * (y / w))); }
double bg_half_lap(double y, double w) { return half_lap_phi(y / w) / w; }

// Width whose background tail 1 - 2w/(pi |x|) matches the far field of the
// profile, w = m / W''(+-1): the deviation then decays faster than 1/|x| and
// stays compatible with the periodic cell.
double tail_width(double m_e, const Potential& W) { return 2.0 * m_e / (W.d2W(-1.0) + W.d2W(1.0)); }

// Zero crossing of the sampled profile by linear interpolation.
double zero_crossing(const std::vector<double>& x, const std::vector<double>& psi) {
  for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
    if (psi[i] == 0.0) return x[i];
    if (psi[i] < 0.0 && psi[i + 1] > 0.0) return x[i] - psi[i] * (x[i + 1] - x[i]) / (psi[i + 1] - psi[i]);
  }
  throw ConvergenceError("profile has no sign change");
}

class ProfileProblem {
 public:
  ProfileProblem(double m_e, const Potential& W, double X, int N, double shift = 0.0, double width = 1.0)
      : m_(m_e), W_(W), X_(X), N_(N), width_(width), fft_(N), x_(N), bg_(N), hbg_(N), kabs_(N / 2 + 1) {
    h_ = 2.0 * X / N;
    for (int i = 0; i < N; ++i) x_[i] = -X + i * h_;
    for (int j = 0; j <= N / 2; ++j) kabs_[j] = kPi * j / X;
    set_shift(shift);
  }

  // Centres the analytic background phi(x - c) at c. The equation is
  // translation invariant, so a front whose background sits at its own
  // centre leaves a deviation v without slowly decaying tails.
  void set_shift(double c) {
    shift_ = c;
    for (int i = 0; i < N_; ++i) {
      bg_[i] = bg_value(x_[i] - c, width_);
      hbg_[i] = bg_half_lap(x_[i] - c, width_);
    }
  }
  double shift() const { return shift_; }
  double width() const { return width_; }

  // Trigonometric interpolant of the grid function v and its derivative at y.
  std::pair<double, double> trig_eval(const std::vector<double>& v, double y) {
    fft_.forward(v, spec_);
    const double t = y + X_;
    double val = spec_[0].real(), der = 0.0;
    for (int j = 1; j <= N_ / 2; ++j) {
      const double kj = kabs_[j];
      const cplx e = std::polar(1.0, kj * t);
      const cplx c = spec_[j] * e;
      const double w = j == N_ / 2 ? 1.0 : 2.0;
      val += w * c.real();
      der += w * (j == N_ / 2 ? 0.0 : -kj * c.imag());
    }
    return {val / N_, der / N_};
  }

  // Zero of the interpolated profile bg + v: Newton on the trigonometric
  // interpolant, started from the linear zero crossing on the grid.
  double front(const std::vector<double>& v) {
    std::vector<double> raw(N_);
    for (int i = 0; i < N_; ++i) raw[i] = bg_[i] + v[i];
    double c = zero_crossing(x_, raw);
    for (int it = 0; it < 50; ++it) {
      const auto [val, der] = trig_eval(v, c);
      const double y = c - shift_;
      const double g = bg_value(y, width_) + val, dg = bg_slope(y, width_) + der;
      if (!(dg > 0.0)) break;
      const double step = g / dg;
      c -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(c))) break;
    }
    return c;
  }

  // Samples of the trigonometric interpolant of v at x_i + a.
  std::vector<double> translate(const std::vector<double>& v, double a) {
    fft_.forward(v, spec_);
    for (int j = 0; j <= N_ / 2; ++j) {
      const cplx e = std::polar(1.0, kabs_[j] * a);
      // The Nyquist mode is kept real (its cosine part) to stay real-valued.
      spec_[j] = j == N_ / 2 ? cplx((spec_[j] * e).real(), 0.0) : spec_[j] * e;
    }
    std::vector<double> out;
    fft_.inverse(spec_, out);
    return out;
  }

  int size() const { return N_; }
  double h() const { return h_; }
  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& background() const { return bg_; }
  double kmax() const { return kabs_.back(); }

  // |k| v, spectrally.
  void half_lap(const std::vector<double>& v, std::vector<double>& out) {
    fft_.forward(v, spec_);
    for (int j = 0; j <= N_ / 2; ++j) spec_[j] *= kabs_[j];
    fft_.inverse(spec_, out);
  }

  // (1 + dt (|k| + s))^(-1) r.
  void implicit_solve(const std::vector<double>& r, double dt, double s, std::vector<double>& out) {
    fft_.forward(r, spec_);
    for (int j = 0; j <= N_ / 2; ++j) spec_[j] /= 1.0 + dt * (kabs_[j] + s);
    fft_.inverse(spec_, out);
  }

  // (|k| + c)^(-1) r.
  void shifted_inverse(const std::vector<double>& r, double c, std::vector<double>& out) {
    fft_.forward(r, spec_);
    for (int j = 0; j <= N_ / 2; ++j) spec_[j] /= kabs_[j] + c;
    fft_.inverse(spec_, out);
  }

  void residual(const std::vector<double>& v, std::vector<double>& F) {
    half_lap(v, F);
    for (int i = 0; i < N_; ++i) F[i] += hbg_[i] + W_.dW(bg_[i] + v[i]) / m_;
  }

  double norm(const std::vector<double>& f) const {
    double s = 0.0;
    for (double t : f) s += t * t;
    return std::sqrt(h_ * s);
  }

  // Linearization J w = |k| w + W''(psi) w / m_e.
  void jacobian(const std::vector<double>& d2, const std::vector<double>& w, std::vector<double>& out) {
    half_lap(w, out);
    for (int i = 0; i < N_; ++i) out[i] += d2[i] * w[i];
  }

  std::vector<double> curvature(const std::vector<double>& v) const {
    std::vector<double> d2(N_);
    for (int i = 0; i < N_; ++i) d2[i] = W_.d2W(bg_[i] + v[i]) / m_;
    return d2;
  }

  // psi' on the grid: background derivative plus spectral derivative of v.
  std::vector<double> slope(const std::vector<double>& v) {
    fft_.forward(v, spec_);
    for (int j = 0; j <= N_ / 2; ++j) spec_[j] *= cplx(0.0, j == N_ / 2 ? 0.0 : kabs_[j]);
    std::vector<double> out;
    fft_.inverse(spec_, out);
    for (int i = 0; i < N_; ++i) {
      out[i] += bg_slope(x_[i] - shift_, width_);
    }
    return out;
  }

 private:
  double m_;
  const Potential& W_;
  double X_;
  int N_;
  double h_ = 0;
  double shift_ = 0;
  double width_ = 1;
  Fft1D fft_;
  std::vector<double> x_, bg_, hbg_, kabs_;
  std::vector<cplx> spec_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Preconditioned MINRES for the symmetric (possibly indefinite) system
// J d = b with the positive definite preconditioner (|k| + c)^(-1).
std::vector<double> preconditioned_minres(ProfileProblem& P, const std::vector<double>& d2,
                                          const std::vector<double>& b, double c_prec, double rtol, int max_it) {
  const int n = P.size();
  std::vector<double> x(n, 0.0), r1 = b, r2 = b, y(n), v(n), w(n, 0.0), w1(n), w2(n, 0.0);
  P.shifted_inverse(r1, c_prec, y);
  const double beta1 = std::sqrt(std::max(0.0, dot(r1, y)));
  if (beta1 == 0.0) return x;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1, cs = -1.0, sn = 0.0;
  for (int it = 0; it < max_it; ++it) {
    const double sc = 1.0 / beta;
    for (int i = 0; i < n; ++i) v[i] = sc * y[i];
    P.jacobian(d2, v, y);
    if (it > 0) axpy(-beta / oldb, r1, y);
    const double alfa = dot(v, y);
    axpy(-alfa / beta, r2, y);
    r1.swap(r2);
    r2 = y;
    P.shifted_inverse(r2, c_prec, y);
    oldb = beta;
    beta = std::sqrt(std::max(0.0, dot(r2, y)));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double ph = cs * phibar;
    phibar = sn * phibar;
    w1.swap(w2);
    w2.swap(w);
    for (int i = 0; i < n; ++i) w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
    axpy(ph, w, x);
    if (phibar <= rtol * beta1 || beta == 0.0) break;
  }
  return x;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }


double interp_periodic(const std::vector<double>& v, double X, double s) {
  const int n = static_cast<int>(v.size());
  const double h = 2.0 * X / n;
  const double t = (s + X) / h;
  const double fl = std::floor(t);
  const double w = t - fl;
  int i = static_cast<int>(fl) % n;
  if (i < 0) i += n;
  return (1.0 - w) * v[i] + w * v[(i + 1) % n];
}

}  // namespace

double ProfileSolution::eval(double s) const {
  const double y = s + center;
  if (std::abs(y) >= X) return bg_value(y - shift, width);
  return bg_value(y - shift, width) + interp_periodic(v, X, y);
}

double profile_residual(double m_e, const Potential& W, double X, const std::vector<double>& v, double shift,
                        double width) {
  ProfileProblem P(m_e, W, X, static_cast<int>(v.size()), shift, width);
  std::vector<double> F(v.size());
  P.residual(v, F);
  return P.norm(F);
}

ProfileSolution solve_profile_m(double m_e, const Potential& W, const ProfileOptions& opt) {
  if (!(m_e > 0.0) || !std::isfinite(m_e)) throw ValidationError("symbol value m(e) must be positive, got " + g17(m_e));
  if (!is_pow2(opt.N) || opt.N < 16) throw InvalidInput("profile grid size must be a power of two >= 16");
  if (!(opt.X > 0.0)) throw InvalidInput("profile half-width must be positive");
  if (!(opt.tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (!(opt.init_scale > 0.0)) throw InvalidInput("initial profile scale must be positive");

  ProfileProblem P(m_e, W, opt.X, opt.N, opt.init_shift, tail_width(m_e, W));
  const int n = opt.N;
  const auto& x = P.x();
  const auto& bg = P.background();

  ProfileSolution sol;
  sol.X = opt.X;
  sol.N = n;
  sol.x = x;
  sol.m_e = m_e;
  sol.width = P.width();
  sol.v.resize(n);
  for (int i = 0; i < n; ++i) sol.v[i] = phi(opt.init_scale * (x[i] - opt.init_shift)) - bg[i];

  std::vector<double> F(n), rhs(n);
  P.residual(sol.v, F);
  double res = P.norm(F);
  sol.history.push_back(res);

  // The front can slide relative to the fixed background (a weakly unstable
  // mode on the periodic cell); moving the background onto the current zero
  // crossing removes that mode without changing the profile.
  const auto recentre = [&] {
    const double c = P.front(sol.v);
    if (std::abs(c - P.shift()) > 1e-12 * std::max(1.0, std::abs(c))) {
      std::vector<double> raw(n);
      for (int i = 0; i < n; ++i) raw[i] = bg[i] + sol.v[i];
      P.set_shift(c);
      for (int i = 0; i < n; ++i) sol.v[i] = raw[i] - bg[i];
      P.residual(sol.v, F);
      res = P.norm(F);
    }
  };

  // Semi-implicit gradient flow with a stabilizing shift s.
  const double s = W.max_abs_d2W() / m_e;
  const double dt = opt.dt > 0.0 ? opt.dt : 0.5 / (P.kmax() + s);
  const double flow_target = opt.method == SolveMethod::Newton ? std::max(opt.newton_switch, opt.tol) : opt.tol;
  while (res > flow_target) {
    if (sol.flow_steps >= opt.max_flow_steps)
      throw ConvergenceError("gradient flow did not reach residual " + g17(flow_target) + " in " +
                             std::to_string(opt.max_flow_steps) + " steps (residual " + g17(res) + ")");
    // v+ = (1 + dt(|k| + s))^(-1) (v - dt (F(v) - |k| v - s v))
    std::vector<double> lin(n);
    P.half_lap(sol.v, lin);
    for (int i = 0; i < n; ++i) rhs[i] = sol.v[i] - dt * (F[i] - lin[i] - s * sol.v[i]);
    P.implicit_solve(rhs, dt, s, sol.v);
    P.residual(sol.v, F);
    res = P.norm(F);
    ++sol.flow_steps;
    if (!std::isfinite(res)) throw ConvergenceError("gradient flow diverged");
    if (sol.flow_steps % 50 == 0) recentre();
    if (sol.flow_steps % 100 == 0) sol.history.push_back(res);
  }

  if (opt.method == SolveMethod::Newton) {
    recentre();
    const double c_prec = std::max(1e-2, std::min(W.d2W(-1.0), W.d2W(1.0)) / m_e);
    while (res > opt.tol) {
      if (sol.newton_steps >= opt.max_newton_steps)
        throw ConvergenceError("Newton iteration did not reach residual " + g17(opt.tol) + " (residual " + g17(res) +
                               ")");
      const std::vector<double> d2 = P.curvature(sol.v);
      std::vector<double> b(n);
      for (int i = 0; i < n; ++i) b[i] = -F[i];
      const std::vector<double> d = preconditioned_minres(P, d2, b, c_prec, 1e-13, 2000);
      // Damped step: halve until the residual decreases.
      double lam = 1.0;
      std::vector<double> trial(n), Ft(n);
      double rt = res;
      for (int ls = 0; ls < 30; ++ls) {
        for (int i = 0; i < n; ++i) trial[i] = sol.v[i] + lam * d[i];
        P.residual(trial, Ft);
        rt = P.norm(Ft);
        if (rt < res) break;
        lam *= 0.5;
      }
      ++sol.newton_steps;
      if (!(rt < res)) {
        // No further decrease is possible at this resolution.
        break;
      }
      sol.v = trial;
      F = Ft;
      res = rt;
      sol.history.push_back(res);
    }
    if (res > opt.tol)
      throw ConvergenceError("Newton iteration stalled at residual " + g17(res) + " above tolerance " + g17(opt.tol));
  }
  sol.residual = res;
  sol.shift = P.shift();

  // Centre on the zero of the interpolated profile and resample the
  // deviation there spectrally.
  const double c = P.front(sol.v);
  sol.center = c;
  const std::vector<double> vc = P.translate(sol.v, c);
  sol.psi.resize(n);
  for (int i = 0; i < n; ++i) {
    const double y = x[i] + c;
    const double b = bg_value(y - sol.shift, sol.width);
    sol.psi[i] = std::abs(y) >= sol.X ? b : b + vc[i];
  }
  return sol;
}

bool case_in_region(const ModelCase& mc) {
  switch (mc.id) {
    case CaseId::CaseI: return in_region_case1(mc.perp.nu, mc.perp.delta);
    case CaseId::CaseII: return in_region_case2(mc.perp.nu, mc.perp.delta);
    case CaseId::CaseIII: return in_region_case3_ratio(mc.parallel.eta1, mc.parallel.eta2);
  }
  return false;
}

ProfileSolution solve_profile(const ModelCase& mc, const Potential& W, double theta, const ProfileOptions& opt) {
  if (!(std::abs(theta) < 0.5 * kPi)) throw InvalidInput("theta must lie in (-pi/2, pi/2)");
  if (!case_in_region(mc))
    throw ValidationError(std::string("case ") + to_string(mc.id) + " parameters lie outside the kernel-positivity region");
  const double m_e = eval_symbol(mc, {std::cos(theta), std::sin(theta)});
  ProfileSolution sol = solve_profile_m(m_e, W, opt);
  sol.theta = theta;
  sol.in_region = true;
  return sol;
}

StabilityReport check_stability(ProfileSolution& sol, const Potential& W, int n_eig, double tol_eig) {
  if (n_eig < 1) throw InvalidInput("n_eig must be positive");
  ProfileProblem P(sol.m_e, W, sol.X, sol.N, sol.shift, sol.width);
  const int n = sol.N;
  const std::vector<double> d2 = P.curvature(sol.v);

  StabilityReport rep;
  {
    const std::vector<double> t = P.slope(sol.v);
    std::vector<double> Jt(n);
    P.jacobian(d2, t, Jt);
    rep.translation_rayleigh = dot(t, Jt) / dot(t, t);
  }

  // Lanczos with full reorthogonalization from a fixed pseudo-random start.
  const int max_steps = std::min(n, 600);
  std::vector<std::vector<double>> Q;
  std::vector<double> alpha, beta;
  std::vector<double> q(n), w(n);
  std::mt19937_64 rng(20240607);
  std::normal_distribution<double> nd;
  for (double& t : q) t = nd(rng);
  {
    const double qn = std::sqrt(dot(q, q));
    for (double& t : q) t /= qn;
  }
  double anorm = 0.0;
  std::vector<double> ritz;
  for (int j = 0; j < max_steps; ++j) {
    Q.push_back(q);
    P.jacobian(d2, q, w);
    const double a = dot(q, w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& qi : Q) axpy(-dot(qi, w), qi, w);
    const double b = std::sqrt(dot(w, w));
    anorm = std::max(anorm, std::abs(a) + b);

    const int m = static_cast<int>(alpha.size());
    const bool last = m == max_steps || b < 1e-14 * std::max(1.0, anorm);
    if (m % 10 != 0 && !last) {
      beta.push_back(b);
      for (int i = 0; i < n; ++i) q[i] = w[i] / b;
      continue;
    }
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
    Eigen::VectorXd sub = m > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1))
                                : Eigen::VectorXd(1);
    if (m == 1) sub(0) = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(std::max(m - 1, 0)), Eigen::ComputeEigenvectors);
    const int k = std::min(n_eig, m);
    bool converged = m >= n_eig;
    for (int i = 0; i < k && converged; ++i)
      if (std::abs(b * es.eigenvectors()(m - 1, i)) > 1e-10 * std::max(1.0, anorm)) converged = false;
    ritz.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
    rep.lanczos_steps = m;
    if (converged || b < 1e-14 * std::max(1.0, anorm)) break;
    beta.push_back(b);
    for (int i = 0; i < n; ++i) q[i] = w[i] / b;
  }
  rep.eigenvalues = ritz;
  rep.stable = !ritz.empty() && ritz.front() >= -tol_eig;
  sol.lambda_min = ritz.empty() ? std::numeric_limits<double>::quiet_NaN() : ritz.front();
  return rep;
}

Reconstruction2D reconstruct_2d(const ProfileSolution& sol, const ModelCase& mc, const Potential& W, int N2) {
  const double h = sol.h();
  const double L2 = N2 * h;
  Reconstruction2D rec;
  rec.u = make_grid(2.0 * sol.X, L2, sol.N, N2);
  GridField2D dev = rec.u;
  for (int i = 0; i < sol.N; ++i)
    for (int j = 0; j < N2; ++j) {
      rec.u(i, j) = bg_value(sol.x[i] - sol.shift, sol.width) + sol.v[i];
      dev(i, j) = sol.v[i];
    }
  const double c = std::cos(sol.theta), s = std::sin(sol.theta);
  // Wavevector (ks, kt) in the aligned cell is ks e + kt e_perp physically.
  const SymbolFn rotated = [&mc, c, s](double ks, double kt) {
    return eval_symbol(mc, {ks * c - kt * s, ks * s + kt * c});
  };
  const GridField2D Lv = apply_multiplier(rotated, dev);
  double acc = 0.0;
  for (int i = 0; i < sol.N; ++i) {
    const double bg_term = sol.m_e * bg_half_lap(sol.x[i] - sol.shift, sol.width);
    for (int j = 0; j < N2; ++j) {
      const double r = (Lv(i, j) + bg_term + W.dW(rec.u(i, j))) / sol.m_e;
      acc += r * r;
    }
  }
  rec.residual = std::sqrt(acc * h * rec.u.h2() / L2);
  return rec;
}

std::string profile_csv(const ProfileSolution& sol) {
  std::ostringstream os;
  os << "x,psi\n";
  for (int i = 0; i < sol.N; ++i) os << g17(sol.x[i]) << ',' << g17(sol.psi[i]) << '\n';
  return os.str();
}

}  // namespace pnm
