// Fourier multipliers: 2x2 Dirichlet-to-Neumann matrices and the reduced
// scalar symbols of the three cases.
#pragma once

#include <functional>
#include <utility>

#include <Eigen/Dense>

#include "pnm/common.hpp"
#include "pnm/moduli.hpp"

namespace pnm {

using DtnMatrix = Eigen::Matrix2d;

// (r1, r2) = (sqrt(k1^2 + k2^2/delta), |k|). Throws InvalidInput at k = 0.
std::pair<double, double> roots_r(const DerivedPerp& dp, Vec2 k);

// Slip plane perpendicular to the isotropy plane; k = (k1, k3).
DtnMatrix dtn_perp(const DerivedPerp& dp, Vec2 k);

// Slip plane parallel to the isotropy plane; k = (k1, k2).
DtnMatrix dtn_parallel(const DerivedParallel& dpar, Vec2 k);

// Closed forms of the reduced symbols.
double symbol_case1(const DerivedPerp& dp, Vec2 k);
double symbol_case2(const DerivedPerp& dp, Vec2 k);
double symbol_case3(const DerivedParallel& dpar, Vec2 k);

// The same symbols obtained from the matrices (det A / a22 for case I,
// det A / a11 for cases II and III). Used as an independent oracle.
double symbol_case1_from_matrix(const DerivedPerp& dp, Vec2 k);
double symbol_case2_from_matrix(const DerivedPerp& dp, Vec2 k);
double symbol_case3_from_matrix(const DerivedParallel& dpar, Vec2 k);

// Supremum over the unit circle of m(k) / (mu |k|) for case I or II,
// sampled at n_theta directions.
double symbol_upper_constant(const DerivedPerp& dp, CaseId id, int n_theta = 4096);

// A scalar multiplier m(k1, k2), evaluated away from the origin.
using SymbolFn = std::function<double(double, double)>;

// Parameters for one of the three reduced problems.
struct ModelCase {
  CaseId id = CaseId::CaseI;
  DerivedPerp perp;          // cases I, II
  DerivedParallel parallel;  // case III
};

ModelCase make_case(CaseId id, const ElasticConstants& ec);
SymbolFn make_symbol(const ModelCase& mc);
double eval_symbol(const ModelCase& mc, Vec2 k);

// Symbol of the anisotropic half-Laplacian, sqrt(k1^2 + rho k2^2).
SymbolFn half_laplacian_symbol(double rho);

}  // namespace pnm
