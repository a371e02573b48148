#include "pnm/nonlocal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <gsl/gsl_sf_expint.h>
#include <tbb/parallel_for.h>

#include "pnm/fft.hpp"
#include "pnm/quadrature.hpp"

namespace pnm {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_grid(const GridField2D& u) {
  if (!(u.L1 > 0.0 && u.L2 > 0.0)) throw InvalidInput("grid lengths must be positive");
  if (!is_pow2(u.N1) || !is_pow2(u.N2) || u.N1 < 8 || u.N2 < 8)
    throw InvalidInput("grid sizes must be powers of two >= 8");
  if (u.v.size() != static_cast<std::size_t>(u.N1) * u.N2) throw InvalidInput("grid value count mismatch");
}

// F(T) = Si(T) - (1 - cos T)/T, so that int_0^R (1 - cos a r)/r^2 dr = |a| F(|a| R).
// Tabulated with cubic Hermite interpolation (F'(T) = (1 - cos T)/T^2).
class SineIntegralTable {
 public:
  explicit SineIntegralTable(double t_max) : h_(1.0 / 32.0) {
    const int n = static_cast<int>(std::ceil(t_max / h_)) + 2;
    f_.resize(n);
    df_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double t = i * h_;
      f_[i] = exact(t);
      df_[i] = t < 1e-4 ? 0.5 - t * t / 24.0 : (1.0 - std::cos(t)) / (t * t);
    }
  }

  double t_max() const { return (static_cast<double>(f_.size()) - 2.0) * h_; }

  double operator()(double t) const {
    const double x = t / h_;
    const std::size_t i = static_cast<std::size_t>(x);
    if (i + 1 >= f_.size()) return exact(t);
    const double s = x - static_cast<double>(i);
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * f_[i] + h10 * h_ * df_[i] + h01 * f_[i + 1] + h11 * h_ * df_[i + 1];
  }

  static double exact(double t) {
    if (t < 1e-4) return 0.5 * t - t * t * t / 72.0;
    return gsl_sf_Si(t) - (1.0 - std::cos(t)) / t;
  }

 private:
  double h_;
  std::vector<double> f_, df_;
};

}  // namespace

GridField2D make_grid(double L1, double L2, int N1, int N2) {
  GridField2D g;
  g.L1 = L1;
  g.L2 = L2;
  g.N1 = N1;
  g.N2 = N2;
  if (N1 > 0 && N2 > 0) g.v.assign(static_cast<std::size_t>(N1) * N2, 0.0);
  check_grid(g);
  return g;
}

GridField2D sample(double L1, double L2, int N1, int N2, const std::function<double(double, double)>& f) {
  GridField2D g = make_grid(L1, L2, N1, N2);
  for (int i = 0; i < N1; ++i)
    for (int j = 0; j < N2; ++j) g(i, j) = f(g.x1(i), g.x2(j));
  return g;
}

GridField2D apply_multiplier(const SymbolFn& m, const GridField2D& u) {
  check_grid(u);
  Fft2D fft(u.N1, u.N2);
  std::vector<cplx> spec;
  fft.forward(u.v, spec);
  const int n2c = fft.n2c();
  for (int i = 0; i < u.N1; ++i) {
    const double k1 = 2.0 * kPi * signed_index(i, u.N1) / u.L1;
    for (int j = 0; j < n2c; ++j) {
      const double k2 = 2.0 * kPi * j / u.L2;
      auto& c = spec[static_cast<std::size_t>(i) * n2c + j];
      c = (i == 0 && j == 0) ? cplx(0.0) : c * m(k1, k2);
    }
  }
  GridField2D out = u;
  fft.inverse(spec, out.v);
  return out;
}

std::vector<double> kernel_transfer(const KernelForm& kf, double L1, double L2, int N1, int N2,
                                    const QuadratureOptions& opt) {
  GridField2D probe = make_grid(L1, L2, N1, N2);
  const double eps = opt.eps > 0.0 ? opt.eps : 0.5 * std::min(probe.h1(), probe.h2());
  const double R = opt.r_cut > 0.0 ? opt.r_cut : 0.5 * std::min(L1, L2);
  if (!(eps > 0.0) || !(R > eps)) throw InvalidInput("quadrature cutoffs must satisfy 0 < eps < r_cut");

  const double kmax = std::hypot(kPi * N1 / L1, kPi * N2 / L2);
  const SineIntegralTable F(kmax * R + 1.0);

  // Radial factor: int_eps^R (1 - cos a r)/r^2 dr, plus the inner-disc Taylor
  // term a^2 eps / 2 and the far-field term 1/R.
  auto radial = [&](double a) {
    const double aa = std::abs(a);
    return aa * (F(aa * R) - F(aa * eps)) + 0.5 * a * a * eps + 1.0 / R;
  };

  // K is pi-periodic on the circle; tabulate it once for 4-point Lagrange
  // interpolation in the angle.
  const int n_tab = 8192;
  const double dth = kPi / n_tab;
  std::vector<double> ktab(n_tab);
  for (int j = 0; j < n_tab; ++j) ktab[j] = eval_kernel(kf, {std::cos(j * dth), std::sin(j * dth)});
  auto kernel_at = [&](double th) {
    const double t = th / dth;
    const double fl = std::floor(t);
    const double w = t - fl;
    int j = static_cast<int>(fl) % n_tab;
    if (j < 0) j += n_tab;
    const double f0 = ktab[(j + n_tab - 1) % n_tab], f1 = ktab[j], f2 = ktab[(j + 1) % n_tab],
                 f3 = ktab[(j + 2) % n_tab];
    return -w * (w - 1) * (w - 2) / 6 * f0 + (w + 1) * (w - 1) * (w - 2) / 2 * f1 -
           (w + 1) * w * (w - 2) / 2 * f2 + (w + 1) * w * (w - 1) / 6 * f3;
  };

  // Gauss-Legendre rules of the admissible orders, with cos(pi x / 2) at the
  // nodes: on either arc, |k . omega| = |k| cos(pi x / 2).
  auto order_for = [&](double kn) {
    int n = opt.min_nodes + static_cast<int>(std::ceil(kn * R));
    n = std::min(std::max(n, opt.min_nodes), opt.max_nodes);
    return (n + 15) / 16 * 16;
  };
  std::map<int, std::vector<double>> node_cos;
  for (int n = order_for(0.0); n <= order_for(kmax); n += 16) {
    const GaussRule& g = gauss_legendre(n);
    auto& c = node_cos[n];
    for (double x : g.x) c.push_back(std::cos(0.5 * kPi * x));
  }

  // The kernels depend on x1^2, x2^2 only, so the transfer function is even in
  // each wavenumber and is computed on one quadrant. Since K(-w) = K(w), the
  // two arcs contribute equally.
  const int q1 = N1 / 2 + 1, q2 = N2 / 2 + 1;
  std::vector<double> quad(static_cast<std::size_t>(q1) * q2, 0.0);
  tbb::parallel_for(0, q1, [&](int i) {
    const double k1 = 2.0 * kPi * i / L1;
    for (int j = 0; j < q2; ++j) {
      if (i == 0 && j == 0) continue;
      const double k2 = 2.0 * kPi * j / L2;
      const double kn = std::hypot(k1, k2);
      const int n = order_for(kn);
      const GaussRule& g = gauss_legendre(n);
      const std::vector<double>& cx = node_cos.at(n);
      const double mid = std::atan2(k2, k1) + kPi;
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += g.w[m] * kernel_at(mid + 0.5 * kPi * g.x[m]) * radial(kn * cx[m]);
      // Two arcs, arc half-length pi/2 on the [-1, 1] weights, 1/(2 pi).
      quad[static_cast<std::size_t>(i) * q2 + j] = 2.0 * s * (0.5 * kPi) / (2.0 * kPi);
    }
  });

  const int n2c = N2 / 2 + 1;
  std::vector<double> out(static_cast<std::size_t>(N1) * n2c);
  for (int i = 0; i < N1; ++i) {
    const int a = std::abs(signed_index(i, N1));
    for (int j = 0; j < n2c; ++j) out[static_cast<std::size_t>(i) * n2c + j] = quad[static_cast<std::size_t>(a) * q2 + j];
  }
  return out;
}

GridField2D apply_kernel_quadrature(const KernelForm& kf, const GridField2D& u, const QuadratureOptions& opt) {
  check_grid(u);
  const std::vector<double> T = kernel_transfer(kf, u.L1, u.L2, u.N1, u.N2, opt);
  Fft2D fft(u.N1, u.N2);
  std::vector<cplx> spec;
  fft.forward(u.v, spec);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= T[i];
  GridField2D out = u;
  fft.inverse(spec, out.v);
  return out;
}

GridField2D aniso_half_laplacian(double rho, const GridField2D& u, HalfLaplacianMode mode,
                                 const QuadratureOptions& opt) {
  if (!(rho > 0.0)) throw InvalidInput("half-Laplacian anisotropy rho must be positive");
  if (mode == HalfLaplacianMode::Symbol) return apply_multiplier(half_laplacian_symbol(rho), u);
  return apply_kernel_quadrature(build_kernel_half_laplacian(rho), u, opt);
}

double inner_product(const GridField2D& u, const GridField2D& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.v.size(); ++i) s += u.v[i] * v.v[i];
  return s * u.h1() * u.h2();
}

EnergyReport energy(const GridField2D& u, const SymbolFn& m, const std::function<double(double)>& W) {
  check_grid(u);
  Fft2D fft(u.N1, u.N2);
  std::vector<cplx> spec;
  fft.forward(u.v, spec);
  const int n2c = fft.n2c();
  const double n_tot = static_cast<double>(u.N1) * u.N2;
  double quad = 0.0;
  for (int i = 0; i < u.N1; ++i) {
    const double k1 = 2.0 * kPi * signed_index(i, u.N1) / u.L1;
    for (int j = 0; j < n2c; ++j) {
      if (i == 0 && j == 0) continue;
      const double k2 = 2.0 * kPi * j / u.L2;
      // Columns 1..N2/2-1 stand for two conjugate modes each.
      const double mult = (j == 0 || (j == u.N2 / 2)) ? 1.0 : 2.0;
      const cplx c = spec[static_cast<std::size_t>(i) * n2c + j] / n_tot;
      quad += mult * m(k1, k2) * std::norm(c);
    }
  }
  EnergyReport r;
  r.nonlocal = 0.5 * quad * u.L1 * u.L2;
  double pot = 0.0;
  for (double x : u.v) pot += W(x);
  r.potential = pot * u.h1() * u.h2();
  r.total = r.nonlocal + r.potential;
  return r;
}

namespace {

// Composite Gauss-Legendre over sorted breakpoints; panels [a, b] with
// 0 < a and b/a > 4 are split geometrically.
template <class F>
double composite(F&& f, std::vector<double> bp, int nodes) {
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  std::vector<double> pts;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    double a = bp[i];
    const double b = bp[i + 1];
    pts.push_back(a);
    if (a > 0.0)
      while (b / a > 4.0) {
        a *= 4.0;
        pts.push_back(a);
      }
  }
  pts.push_back(bp.back());
  const GaussRule& g = gauss_legendre(nodes);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    if (!(b > a)) continue;
    const double hm = 0.5 * (b - a), m = 0.5 * (a + b);
    double p = 0.0;
    for (int k = 0; k < nodes; ++k) p += g.w[k] * f(m + hm * g.x[k]);
    s += hm * p;
  }
  return s;
}

}  // namespace

EnergyReport localized_energy_line(const std::function<double(double)>& psi, double theta, const KernelForm& kf,
                                   double R, const std::function<double(double)>& W, const LineEnergyOptions& opt) {
  if (!(R > 0.0)) throw InvalidInput("ball radius must be positive");
  const double e1 = std::cos(theta), e2 = std::sin(theta);

  // Directions omega on two arcs split where omega is orthogonal to e.
  struct Dir {
    double w, K, c, d;  // weight, kernel value, omega.e, omega.e_perp
  };
  std::vector<Dir> dirs;
  {
    const GaussRule& g = gauss_legendre(opt.n_omega / 2);
    for (int arc = 0; arc < 2; ++arc) {
      const double mid = theta + 0.5 * kPi + (arc + 0.5) * kPi;
      for (std::size_t m = 0; m < g.x.size(); ++m) {
        const double om = mid + 0.5 * kPi * g.x[m];
        const double o1 = std::cos(om), o2 = std::sin(om);
        dirs.push_back({0.5 * kPi * g.w[m], eval_kernel(kf, {o1, o2}), o1 * e1 + o2 * e2, -o1 * e2 + o2 * e1});
      }
    }
  }

  // Breakpoints across the line, refined towards the core.
  std::vector<double> sbp{-R, 0.0, R};
  for (double w = 0.5 * opt.core; w < R; w *= 2.0) {
    sbp.push_back(w);
    sbp.push_back(-w);
  }
  std::sort(sbp.begin(), sbp.end());
  const GaussRule& gs = gauss_legendre(opt.s_nodes);
  const GaussRule& gt = gauss_legendre(opt.t_nodes);
  std::vector<double> s_nodes, s_weights;
  for (std::size_t i = 0; i + 1 < sbp.size(); ++i) {
    const double a = sbp[i], b = sbp[i + 1], hm = 0.5 * (b - a), m = 0.5 * (a + b);
    for (int k = 0; k < opt.s_nodes; ++k) {
      s_nodes.push_back(m + hm * gs.x[k]);
      s_weights.push_back(hm * gs.w[k]);
    }
  }

  const double core = opt.core;
  const int rn = opt.r_nodes;
  std::vector<double> contrib(s_nodes.size(), 0.0), pot(s_nodes.size(), 0.0);
  tbb::parallel_for(std::size_t(0), s_nodes.size(), [&](std::size_t is) {
    const double s = s_nodes[is];
    const double half = std::sqrt(std::max(0.0, R * R - s * s));
    const double u0 = psi(s);
    pot[is] = s_weights[is] * 2.0 * half * W(u0);
    double acc = 0.0;
    for (int it = 0; it < opt.t_nodes; ++it) {
      const double t = half * gt.x[it], wt = half * gt.w[it];
      double acc_t = 0.0;
      for (const Dir& dr : dirs) {
        const double c = dr.c;
        if (std::abs(c) < 1e-14) continue;
        const double xo = s * c + t * dr.d;  // x . omega
        const double rho = -xo + std::sqrt(std::max(0.0, xo * xo + R * R - s * s - t * t));
        auto du = [&](double r) { return u0 - psi(s + r * c); };
        // Radii where the ray crosses the profile core.
        const double rstar = -s / c, scale = core / std::abs(c);
        std::vector<double> marks;
        for (double m : {-32.0, -8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0, 32.0}) marks.push_back(rstar + m * scale);

        std::vector<double> bp{0.0, rho};
        for (double r : marks)
          if (r > 0.0 && r < rho) bp.push_back(r);
        const double inner = composite(
            [&](double r) {
              if (r < 1e-12) return 0.0;
              const double d = du(r);
              return d * d / (r * r);
            },
            bp, rn);

        // Outer part with r = rho / tau, tau in (0, 1].
        std::vector<double> tb{0.0, 1.0};
        for (double r : marks)
          if (r > rho) tb.push_back(rho / r);
        const double outer = rho > 0.0 ? composite(
                                              [&](double tau) {
                                                if (tau <= 0.0) {
                                                  const double d = u0 - psi(c > 0 ? 1e300 : -1e300);
                                                  return d * d / rho;
                                                }
                                                const double d = du(rho / tau);
                                                return d * d / rho;
                                              },
                                              tb, rn)
                                        : 0.0;
        acc_t += dr.w * dr.K * (inner + 2.0 * outer);
      }
      acc += wt * acc_t;
    }
    contrib[is] = s_weights[is] * acc;
  });

  EnergyReport r;
  r.radius = R;
  for (double v : contrib) r.pair_integral += v;
  for (double v : pot) r.potential += v;
  r.nonlocal = r.pair_integral / (8.0 * kPi);
  r.total = r.nonlocal + r.potential;
  return r;
}

}  // namespace pnm
