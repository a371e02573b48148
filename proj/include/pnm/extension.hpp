// Half-space extension: the decaying solutions of the elasticity system on
// either side of the slip plane, 3D reconstruction from slip-plane data,
// stresses, strains and the elastic energy density.
#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pnm/common.hpp"
#include "pnm/moduli.hpp"

namespace pnm {

// Perp: slip plane x2 = 0 (normal x2, tangential x1, x3).
// Parallel: slip plane x3 = 0 (normal x3, tangential x1, x2).
enum class Orientation { Perp, Parallel };
const char* to_string(Orientation o);

using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using CMat3 = Eigen::Matrix3cd;
using CVec3 = Eigen::Vector3cd;

// Fourier transform in the tangential variables, exp(i k . x_t), turns the
// elasticity system into M2 U'' + M1 U' + M0 U = 0 in the normal variable.
// The normal displacement component is replaced by w = -i u_normal so all
// coefficients are real; U = (u1, w2, u3) (perp) or (u1, u2, w3) (parallel).
// The first-order form is [U; U']' = A [U; U'].
struct HalfSpaceSystem {
  Orientation orient = Orientation::Perp;
  ElasticConstants ec;
  Vec2 k;  // (k1, k3) perp, (k1, k2) parallel
  Mat3 M2, M1, M0;
  Mat6 A;

  struct Cluster {
    std::complex<double> value;
    int algebraic = 0;  // multiplicity among the six eigenvalues
    int geometric = 0;  // dim ker(A - value)
  };
  std::vector<std::complex<double>> eigenvalues;  // sorted by real part
  std::vector<Cluster> clusters;
  bool jordan = false;  // some cluster has geometric < algebraic

  // Orthonormal bases of the decaying (Re < 0) and growing (Re > 0) invariant
  // subspaces, and A restricted to them.
  Eigen::Matrix<double, 6, 3> stable, unstable;
  Mat3 T_stable, T_unstable;
  // Boundary Neumann maps U'(0) = G U(0) for the decaying solution above
  // (G_plus) and below (G_minus) the slip plane.
  Mat3 G_plus, G_minus;
};

// Throws InvalidInput at k = 0, ValidationError for invalid constants.
HalfSpaceSystem build_halfspace(Orientation o, const ElasticConstants& ec, Vec2 k);

// Solution operators in the real variables U: U(x) = B(x) U(0) for the
// solution decaying as x -> +inf (B_plus, x >= 0) or x -> -inf (B_minus, x <= 0).
Mat3 B_plus(const HalfSpaceSystem& s, double x);
Mat3 B_minus(const HalfSpaceSystem& s, double x);
// The same operators acting on the physical Fourier coefficients u^.
CMat3 B_plus_physical(const HalfSpaceSystem& s, double x);
CMat3 B_minus_physical(const HalfSpaceSystem& s, double x);

// Slip-plane jump convention u^- = J u^+ in the variables U.
Mat3 jump_matrix(Orientation o);
// Index of the normal component (1 for perp, 2 for parallel) and of the two
// tangential ones.
int normal_index(Orientation o);
std::pair<int, int> tangential_indices(Orientation o);

// Given tangential slip-plane data, determines the normal component from
// continuity of the normal traction across the plane; returns U^+(0).
CVec3 upper_trace(const HalfSpaceSystem& s, std::complex<double> ta, std::complex<double> tb);

// Tractions sigma_{i,normal} at the plane in the variables U (the normal
// traction is returned divided by i, so all entries are real-linear).
Eigen::Vector3cd traction(const HalfSpaceSystem& s, const CVec3& U, const CVec3& dU);

// 2x2 map from tangential data (ta, tb) to -(sigma^+ + sigma^-) tangential,
// i.e. the Dirichlet-to-Neumann matrix of the two-sided problem.
Eigen::Matrix2d numeric_dtn(Orientation o, const ElasticConstants& ec, Vec2 k);

// Eigenvalue report (perp: +-r1, +-r2; parallel: +-theta_i |k|).
std::string describe(const HalfSpaceSystem& s);

// Tangential boundary data on the periodic slip-plane cell
// [-L1/2, L1/2) x [-L2/2, L2/2), row-major N1 x N2.
struct BoundaryData {
  Orientation orient = Orientation::Perp;
  double L1 = 0, L2 = 0;
  int N1 = 0, N2 = 0;
  std::vector<double> ta, tb;  // first and second tangential displacement on the upper face
};

// Displacements on both sides: layer j of `upper` lies at normal coordinate
// j*hn, layer j of `lower` at -j*hn (layer 0 of each is the respective face of
// the slip plane). Component c at (layer j, i, l) is stored at
// u[c][(j*N1 + i)*N2 + l], components in physical order (u1, u2, u3).
struct Field3D {
  Orientation orient = Orientation::Perp;
  double L1 = 0, L2 = 0, hn = 0;
  int N1 = 0, N2 = 0, layers = 0;
  std::array<std::vector<double>, 3> upper, lower;

  std::size_t index(int j, int i, int l) const {
    return (static_cast<std::size_t>(j) * N1 + i) * N2 + l;
  }
};

// Per-mode reconstruction; raises ConvergenceError if a mode acquires a
// growing component beyond tolerance.
Field3D extend(const ElasticConstants& ec, const BoundaryData& bd, double hn, int layers);

// Strain and stress of one side of a Field3D. Tangential derivatives by
// periodic centered differences, normal derivatives by centered differences
// with one-sided second-order differences at the first and last layers.
struct StressStrain {
  // Components in order 11, 22, 33, 23, 13, 12 (tensor strain, not Voigt).
  std::array<std::vector<double>, 6> eps, sigma;
  std::vector<double> energy_density;  // 1/2 sigma : eps
};
StressStrain stress_strain(const Field3D& f, const ElasticConstants& ec, bool upper_side);

// Constitutive law sigma = C : eps, tensor components 11, 22, 33, 23, 13, 12.
std::array<double, 6> constitutive(const ElasticConstants& ec, const std::array<double, 6>& eps);

// Relative residual |L u| / sum|terms| of the Navier operator
// (L u)_i = C_ijkl d_j d_l u_k at a point, with 8th-order finite differences
// of step h applied to the given displacement field (physical coordinates).
double navier_residual(const ElasticConstants& ec, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& u,
                       const Eigen::Vector3d& x, double h);

// Real-space single-mode field Re(u^(x_n) exp(i k . x_t)) for x_n >= 0 built
// from B_plus; physical coordinates.
std::function<Eigen::Vector3d(const Eigen::Vector3d&)> single_mode_field(const HalfSpaceSystem& s, const CVec3& U0);

}  // namespace pnm
