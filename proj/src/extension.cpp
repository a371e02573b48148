#include "pnm/extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "pnm/fft.hpp"

namespace pnm {

const char* to_string(Orientation o) { return o == Orientation::Perp ? "perp" : "parallel"; }

int normal_index(Orientation o) { return o == Orientation::Perp ? 1 : 2; }

std::pair<int, int> tangential_indices(Orientation o) {
  return o == Orientation::Perp ? std::pair<int, int>{0, 2} : std::pair<int, int>{0, 1};
}

Mat3 jump_matrix(Orientation o) {
  // Tangential components change sign across the plane, the normal one does not.
  return o == Orientation::Perp ? Eigen::Vector3d(-1, 1, -1).asDiagonal().toDenseMatrix()
                                : Eigen::Vector3d(-1, -1, 1).asDiagonal().toDenseMatrix();
}

namespace {

using Mat63 = Eigen::Matrix<double, 6, 3>;

void assemble(HalfSpaceSystem& s) {
  const auto& C = s.ec;
  const double ka = s.k.a, kb = s.k.b;
  if (s.orient == Orientation::Perp) {
    const double k1 = ka, k3 = kb;
    s.M2 = Eigen::Vector3d(C.c66, C.c11, C.c44).asDiagonal();
    s.M1 << 0, -(C.c11 - C.c66) * k1, 0,
            (C.c11 - C.c66) * k1, 0, (C.c13 + C.c44) * k3,
            0, -(C.c13 + C.c44) * k3, 0;
    s.M0 << -C.c11 * k1 * k1 - C.c44 * k3 * k3, 0, -(C.c13 + C.c44) * k1 * k3,
            0, -C.c66 * k1 * k1 - C.c44 * k3 * k3, 0,
            -(C.c13 + C.c44) * k1 * k3, 0, -C.c44 * k1 * k1 - C.c33 * k3 * k3;
  } else {
    const double k1 = ka, k2 = kb, kk = ka * ka + kb * kb;
    s.M2 = Eigen::Vector3d(C.c44, C.c44, C.c33).asDiagonal();
    s.M1 << 0, 0, -(C.c13 + C.c44) * k1,
            0, 0, -(C.c13 + C.c44) * k2,
            (C.c13 + C.c44) * k1, (C.c13 + C.c44) * k2, 0;
    s.M0 << -C.c11 * k1 * k1 - C.c66 * k2 * k2, -(C.c11 - C.c66) * k1 * k2, 0,
            -(C.c11 - C.c66) * k1 * k2, -C.c66 * k1 * k1 - C.c11 * k2 * k2, 0,
            0, 0, -C.c44 * kk;
  }
  const Mat3 M2i = s.M2.inverse();
  s.A.setZero();
  s.A.topRightCorner<3, 3>() = Mat3::Identity();
  s.A.bottomLeftCorner<3, 3>() = -M2i * s.M0;
  s.A.bottomRightCorner<3, 3>() = -M2i * s.M1;
}

// Matrix sign function by the Newton iteration X <- (X + X^-1)/2.
Mat6 matrix_sign(const Mat6& A) {
  Mat6 X = A;
  for (int it = 0; it < 100; ++it) {
    const Mat6 Xn = 0.5 * (X + X.inverse());
    const double d = (Xn - X).norm();
    X = Xn;
    if (d <= 1e-14 * X.norm()) return X;
  }
  throw ConvergenceError("matrix sign iteration did not converge");
}

Mat63 range3(const Mat6& P) {
  Eigen::JacobiSVD<Mat6> svd(P, Eigen::ComputeFullU);
  return svd.matrixU().leftCols<3>();
}

void classify(HalfSpaceSystem& s) {
  // The real Schur iteration can stall on the derogatory matrices that occur
  // at repeated roots; the complex QR iteration does not.
  Eigen::ComplexEigenSolver<Eigen::Matrix<std::complex<double>, 6, 6>> es(s.A.cast<std::complex<double>>(), false);
  if (es.info() != Eigen::Success) throw ConvergenceError("half-space eigenvalue iteration did not converge");
  s.eigenvalues.clear();
  for (int i = 0; i < 6; ++i) s.eigenvalues.push_back(es.eigenvalues()[i]);
  std::sort(s.eigenvalues.begin(), s.eigenvalues.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  double scale = 0.0;
  for (auto z : s.eigenvalues) scale = std::max(scale, std::abs(z));
  const double ctol = 1e-6 * scale;
  s.clusters.clear();
  std::vector<bool> used(6, false);
  const double anorm = s.A.norm();
  for (int i = 0; i < 6; ++i) {
    if (used[i]) continue;
    std::complex<double> sum = 0.0;
    int cnt = 0;
    for (int j = i; j < 6; ++j)
      if (!used[j] && std::abs(s.eigenvalues[j] - s.eigenvalues[i]) < ctol) {
        used[j] = true;
        sum += s.eigenvalues[j];
        ++cnt;
      }
    HalfSpaceSystem::Cluster c;
    c.value = sum / static_cast<double>(cnt);
    c.algebraic = cnt;
    const Eigen::Matrix<std::complex<double>, 6, 6> B =
        s.A.cast<std::complex<double>>() - c.value * Eigen::Matrix<std::complex<double>, 6, 6>::Identity();
    Eigen::JacobiSVD<Eigen::Matrix<std::complex<double>, 6, 6>> svd(B);
    int null = 0;
    for (int j = 0; j < 6; ++j)
      if (svd.singularValues()[j] <= 1e-9 * anorm) ++null;
    c.geometric = std::max(1, null);
    if (c.geometric < c.algebraic) s.jordan = true;
    s.clusters.push_back(c);
  }
}

}  // namespace

HalfSpaceSystem build_halfspace(Orientation o, const ElasticConstants& ec, Vec2 k) {
  const double kn = k.norm();
  if (!(kn > 0.0) || !std::isfinite(kn)) throw InvalidInput("half-space system requires k != 0");
  const ValidationReport vr = validate(ec);
  if (!vr.valid) throw ValidationError("elastic constants are not elliptic: " + vr.diagnostic);
  HalfSpaceSystem s;
  s.orient = o;
  s.ec = ec;
  s.k = k;
  assemble(s);
  classify(s);

  const Mat6 sgn = matrix_sign(s.A / kn);
  const Mat6 I = Mat6::Identity();
  s.stable = range3(0.5 * (I - sgn));
  s.unstable = range3(0.5 * (I + sgn));
  s.T_stable = s.stable.transpose() * s.A * s.stable;
  s.T_unstable = s.unstable.transpose() * s.A * s.unstable;
  const Mat3 top_s = s.stable.topRows<3>(), top_u = s.unstable.topRows<3>();
  s.G_plus = s.stable.bottomRows<3>() * top_s.inverse();
  s.G_minus = s.unstable.bottomRows<3>() * top_u.inverse();
  return s;
}

Mat3 B_plus(const HalfSpaceSystem& s, double x) {
  if (x < 0.0) throw InvalidInput("B_plus is defined for x >= 0");
  const Mat3 top = s.stable.topRows<3>();
  const Mat3 E = (s.T_stable * x).exp();
  return top * E * top.inverse();
}

Mat3 B_minus(const HalfSpaceSystem& s, double x) {
  if (x > 0.0) throw InvalidInput("B_minus is defined for x <= 0");
  const Mat3 top = s.unstable.topRows<3>();
  const Mat3 E = (s.T_unstable * x).exp();
  return top * E * top.inverse();
}

namespace {
// u^ = D U with D = diag(1, i, 1) (perp) or diag(1, 1, i) (parallel).
CMat3 physical(const HalfSpaceSystem& s, const Mat3& B) {
  Eigen::Vector3cd d(1.0, 1.0, 1.0);
  d[normal_index(s.orient)] = std::complex<double>(0.0, 1.0);
  return d.asDiagonal() * B.cast<std::complex<double>>() * d.conjugate().asDiagonal();
}
}  // namespace

CMat3 B_plus_physical(const HalfSpaceSystem& s, double x) { return physical(s, B_plus(s, x)); }
CMat3 B_minus_physical(const HalfSpaceSystem& s, double x) { return physical(s, B_minus(s, x)); }

Eigen::Vector3cd traction(const HalfSpaceSystem& s, const CVec3& U, const CVec3& dU) {
  const auto& C = s.ec;
  Eigen::Vector3cd t;
  if (s.orient == Orientation::Perp) {
    const double k1 = s.k.a, k3 = s.k.b;
    t[0] = C.c66 * (dU[0] - k1 * U[1]);
    t[1] = (C.c11 - 2.0 * C.c66) * k1 * U[0] + C.c11 * dU[1] + C.c13 * k3 * U[2];
    t[2] = C.c44 * (dU[2] - k3 * U[1]);
  } else {
    const double k1 = s.k.a, k2 = s.k.b;
    t[0] = C.c44 * (dU[0] - k1 * U[2]);
    t[1] = C.c44 * (dU[1] - k2 * U[2]);
    t[2] = C.c13 * (k1 * U[0] + k2 * U[1]) + C.c33 * dU[2];
  }
  return t;
}

CVec3 upper_trace(const HalfSpaceSystem& s, std::complex<double> ta, std::complex<double> tb) {
  const int n = normal_index(s.orient);
  const auto [a, b] = tangential_indices(s.orient);
  const Mat3 J = jump_matrix(s.orient);
  // Jump of the normal traction as a linear functional of U^+(0).
  auto jump = [&](const CVec3& U) {
    const CVec3 L = J.cast<std::complex<double>>() * U;
    return traction(s, U, s.G_plus.cast<std::complex<double>>() * U)[n] -
           traction(s, L, s.G_minus.cast<std::complex<double>>() * L)[n];
  };
  std::complex<double> c[3];
  for (int i = 0; i < 3; ++i) c[i] = jump(CVec3::Unit(i));
  if (std::abs(c[n]) < 1e-14 * (std::abs(c[a]) + std::abs(c[b]) + 1e-300))
    throw ConvergenceError("normal traction continuity does not determine the normal displacement");
  CVec3 U;
  U[a] = ta;
  U[b] = tb;
  U[n] = -(c[a] * ta + c[b] * tb) / c[n];
  return U;
}

Eigen::Matrix2d numeric_dtn(Orientation o, const ElasticConstants& ec, Vec2 k) {
  const HalfSpaceSystem s = build_halfspace(o, ec, k);
  const auto [a, b] = tangential_indices(o);
  const Mat3 J = jump_matrix(o);
  Eigen::Matrix2d D;
  for (int col = 0; col < 2; ++col) {
    const CVec3 U = upper_trace(s, col == 0 ? 1.0 : 0.0, col == 0 ? 0.0 : 1.0);
    const CVec3 L = J.cast<std::complex<double>>() * U;
    const Eigen::Vector3cd sp = traction(s, U, s.G_plus.cast<std::complex<double>>() * U);
    const Eigen::Vector3cd sm = traction(s, L, s.G_minus.cast<std::complex<double>>() * L);
    D(0, col) = -(sp[a] + sm[a]).real();
    D(1, col) = -(sp[b] + sm[b]).real();
  }
  return D;
}

std::string describe(const HalfSpaceSystem& s) {
  std::ostringstream os;
  os << "orientation " << to_string(s.orient) << ", k = (" << g17(s.k.a) << ", " << g17(s.k.b) << ")\n";
  for (const auto& c : s.clusters)
    os << "  eigenvalue " << g17(c.value.real()) << (c.value.imag() < 0 ? " - " : " + ") << g17(std::abs(c.value.imag()))
       << "i  algebraic " << c.algebraic << "  geometric " << c.geometric << '\n';
  os << "  jordan " << (s.jordan ? "yes" : "no") << '\n';
  return os.str();
}

Field3D extend(const ElasticConstants& ec, const BoundaryData& bd, double hn, int layers) {
  auto pow2 = [](int n) { return n >= 8 && (n & (n - 1)) == 0; };
  if (!pow2(bd.N1) || !pow2(bd.N2)) throw InvalidInput("slip-plane grid sizes must be powers of two >= 8");
  if (!(bd.L1 > 0.0 && bd.L2 > 0.0)) throw InvalidInput("slip-plane cell lengths must be positive");
  const std::size_t np = static_cast<std::size_t>(bd.N1) * bd.N2;
  if (bd.ta.size() != np || bd.tb.size() != np) throw InvalidInput("boundary data size mismatch");
  if (!(hn > 0.0) || layers < 3) throw InvalidInput("need hn > 0 and at least 3 layers");
  if (!validate(ec).valid) throw ValidationError("elastic constants are not elliptic");

  const Orientation o = bd.orient;
  const auto [ia, ib] = tangential_indices(o);
  const int in = normal_index(o);
  const Mat3 J = jump_matrix(o);
  Eigen::Vector3cd d(1.0, 1.0, 1.0);
  d[in] = std::complex<double>(0.0, 1.0);

  Fft2D fft(bd.N1, bd.N2);
  std::vector<cplx> sa, sb;
  fft.forward(bd.ta, sa);
  fft.forward(bd.tb, sb);
  const int n2c = fft.n2c();
  const std::size_t nc = static_cast<std::size_t>(bd.N1) * n2c;
  // spec[side][component][layer * nc + mode]
  std::vector<cplx> spec[2][3];
  for (auto& side : spec)
    for (auto& comp : side) comp.assign(nc * layers, 0.0);

  for (int i = 0; i < bd.N1; ++i) {
    const double ka = 2.0 * kPi * signed_index(i, bd.N1) / bd.L1;
    for (int j = 0; j < n2c; ++j) {
      const double kb = 2.0 * kPi * j / bd.L2;
      const std::size_t m = static_cast<std::size_t>(i) * n2c + j;
      CVec3 Up, Um;
      if (i == 0 && j == 0) {
        // Rigid translation: constant in the normal direction, no normal part.
        Up = CVec3::Zero();
        Up[ia] = sa[m];
        Up[ib] = sb[m];
        Um = J.cast<std::complex<double>>() * Up;
        for (int l = 0; l < layers; ++l)
          for (int c = 0; c < 3; ++c) {
            spec[0][c][l * nc + m] = d[c] * Up[c];
            spec[1][c][l * nc + m] = d[c] * Um[c];
          }
        continue;
      }
      const HalfSpaceSystem s = build_halfspace(o, ec, {ka, kb});
      Up = upper_trace(s, sa[m], sb[m]);
      Um = J.cast<std::complex<double>>() * Up;
      // Growing-mode check: [U; U'] must lie in the stable subspace.
      Eigen::Matrix<std::complex<double>, 6, 1> z;
      z << Up, s.G_plus.cast<std::complex<double>>() * Up;
      const auto S = s.stable.cast<std::complex<double>>();
      const double leak = (z - S * (S.adjoint() * z)).norm();
      if (leak > 1e-8 * std::max(z.norm(), 1e-300))
        throw ConvergenceError("growing-mode contamination " + g17(leak / z.norm()) + " at k = (" + g17(ka) + ", " +
                               g17(kb) + ")");
      const Mat3 Ep = B_plus(s, hn), Em = B_minus(s, -hn);
      CVec3 up = Up, um = Um;
      for (int l = 0; l < layers; ++l) {
        for (int c = 0; c < 3; ++c) {
          spec[0][c][l * nc + m] = d[c] * up[c];
          spec[1][c][l * nc + m] = d[c] * um[c];
        }
        up = Ep.cast<std::complex<double>>() * up;
        um = Em.cast<std::complex<double>>() * um;
      }
    }
  }

  Field3D f;
  f.orient = o;
  f.L1 = bd.L1;
  f.L2 = bd.L2;
  f.hn = hn;
  f.N1 = bd.N1;
  f.N2 = bd.N2;
  f.layers = layers;
  std::vector<cplx> buf(nc);
  std::vector<double> out;
  for (int side = 0; side < 2; ++side)
    for (int c = 0; c < 3; ++c) {
      auto& dst = side == 0 ? f.upper[c] : f.lower[c];
      dst.resize(np * layers);
      for (int l = 0; l < layers; ++l) {
        std::copy(spec[side][c].begin() + l * nc, spec[side][c].begin() + (l + 1) * nc, buf.begin());
        fft.inverse(buf, out);
        std::copy(out.begin(), out.end(), dst.begin() + l * np);
      }
    }
  return f;
}

std::array<double, 6> constitutive(const ElasticConstants& C, const std::array<double, 6>& e) {
  const double c12 = C.c11 - 2.0 * C.c66;
  return {C.c11 * e[0] + c12 * e[1] + C.c13 * e[2],
          c12 * e[0] + C.c11 * e[1] + C.c13 * e[2],
          C.c13 * (e[0] + e[1]) + C.c33 * e[2],
          2.0 * C.c44 * e[3],
          2.0 * C.c44 * e[4],
          2.0 * C.c66 * e[5]};
}

StressStrain stress_strain(const Field3D& f, const ElasticConstants& ec, bool upper_side) {
  const auto& u = upper_side ? f.upper : f.lower;
  const int in = normal_index(f.orient);
  const auto [ia, ib] = tangential_indices(f.orient);
  const double ha = f.L1 / f.N1, hb = f.L2 / f.N2;
  const double sgn = upper_side ? 1.0 : -1.0;  // lower layers run towards -x_n
  const std::size_t n = static_cast<std::size_t>(f.layers) * f.N1 * f.N2;
  StressStrain r;
  for (auto& v : r.eps) v.assign(n, 0.0);
  for (auto& v : r.sigma) v.assign(n, 0.0);
  r.energy_density.assign(n, 0.0);
  for (int l = 0; l < f.layers; ++l)
    for (int i = 0; i < f.N1; ++i)
      for (int j = 0; j < f.N2; ++j) {
        // grad[c][axis] = d u_c / d x_axis
        double grad[3][3];
        const int ip = (i + 1) % f.N1, im = (i + f.N1 - 1) % f.N1;
        const int jp = (j + 1) % f.N2, jm = (j + f.N2 - 1) % f.N2;
        for (int c = 0; c < 3; ++c) {
          const auto& v = u[c];
          grad[c][ia] = (v[f.index(l, ip, j)] - v[f.index(l, im, j)]) / (2.0 * ha);
          grad[c][ib] = (v[f.index(l, i, jp)] - v[f.index(l, i, jm)]) / (2.0 * hb);
          double dn;
          if (l == 0)
            dn = (-3.0 * v[f.index(0, i, j)] + 4.0 * v[f.index(1, i, j)] - v[f.index(2, i, j)]) / (2.0 * f.hn);
          else if (l == f.layers - 1)
            dn = (3.0 * v[f.index(l, i, j)] - 4.0 * v[f.index(l - 1, i, j)] + v[f.index(l - 2, i, j)]) / (2.0 * f.hn);
          else
            dn = (v[f.index(l + 1, i, j)] - v[f.index(l - 1, i, j)]) / (2.0 * f.hn);
          grad[c][in] = sgn * dn;
        }
        const std::array<double, 6> e{grad[0][0], grad[1][1], grad[2][2], 0.5 * (grad[1][2] + grad[2][1]),
                                      0.5 * (grad[0][2] + grad[2][0]), 0.5 * (grad[0][1] + grad[1][0])};
        const std::array<double, 6> s = constitutive(ec, e);
        const std::size_t p = f.index(l, i, j);
        double w = 0.0;
        for (int q = 0; q < 6; ++q) {
          r.eps[q][p] = e[q];
          r.sigma[q][p] = s[q];
          w += (q < 3 ? 1.0 : 2.0) * s[q] * e[q];
        }
        r.energy_density[p] = 0.5 * w;
      }
  return r;
}

namespace {

// Voigt index of the symmetric pair (i, j).
int voigt(int i, int j) {
  if (i == j) return i;
  if (i + j == 3) return 3;  // 23
  if (i + j == 2) return 4;  // 13
  return 5;                  // 12
}

Eigen::Matrix<double, 6, 6> voigt_stiffness(const ElasticConstants& C) {
  Eigen::Matrix<double, 6, 6> m = Eigen::Matrix<double, 6, 6>::Zero();
  const double c12 = C.c11 - 2.0 * C.c66;
  m(0, 0) = m(1, 1) = C.c11;
  m(0, 1) = m(1, 0) = c12;
  m(0, 2) = m(2, 0) = m(1, 2) = m(2, 1) = C.c13;
  m(2, 2) = C.c33;
  m(3, 3) = m(4, 4) = C.c44;
  m(5, 5) = C.c66;
  return m;
}

}  // namespace

double navier_residual(const ElasticConstants& ec, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& u,
                       const Eigen::Vector3d& x, double h) {
  static const double d2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  static const double d1[5] = {0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  // D[a][b] = d_a d_b u (3-vector).
  Eigen::Vector3d D[3][3];
  const Eigen::Vector3d u0 = u(x);
  for (int a = 0; a < 3; ++a) {
    Eigen::Vector3d s = d2[0] * u0;
    for (int m = 1; m <= 4; ++m) {
      Eigen::Vector3d dx = Eigen::Vector3d::Zero();
      dx[a] = m * h;
      s += d2[m] * (u(x + dx) + u(x - dx));
    }
    D[a][a] = s / (h * h);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      Eigen::Vector3d s = Eigen::Vector3d::Zero();
      for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 4; ++n) {
          Eigen::Vector3d ea = Eigen::Vector3d::Zero(), eb = Eigen::Vector3d::Zero();
          ea[a] = m * h;
          eb[b] = n * h;
          s += d1[m] * d1[n] * (u(x + ea + eb) - u(x + ea - eb) - u(x - ea + eb) + u(x - ea - eb));
        }
      D[a][b] = D[b][a] = s / (h * h);
    }
  const auto Cv = voigt_stiffness(ec);
  double res = 0.0, scale = 0.0;
  for (int i = 0; i < 3; ++i) {
    double Li = 0.0, Ti = 0.0;
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const double t = Cv(voigt(i, j), voigt(k, l)) * D[j][l][k];
          Li += t;
          Ti += std::abs(t);
        }
    res = std::max(res, std::abs(Li));
    scale = std::max(scale, Ti);
  }
  return scale > 0.0 ? res / scale : 0.0;
}

std::function<Eigen::Vector3d(const Eigen::Vector3d&)> single_mode_field(const HalfSpaceSystem& s, const CVec3& U0) {
  const int in = normal_index(s.orient);
  const auto [ia, ib] = tangential_indices(s.orient);
  return [s, U0, in, ia, ib](const Eigen::Vector3d& x) -> Eigen::Vector3d {
    Eigen::Vector3cd d(1.0, 1.0, 1.0);
    d[in] = std::complex<double>(0.0, 1.0);
    const CVec3 uh = B_plus_physical(s, x[in]) * d.asDiagonal() * U0;
    const std::complex<double> ph = std::exp(std::complex<double>(0.0, s.k.a * x[ia] + s.k.b * x[ib]));
    return (uh * ph).real();
  };
}

}  // namespace pnm
