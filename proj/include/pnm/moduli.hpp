// Elastic constants of a transversely isotropic medium (x3 = symmetry axis)
// and the derived parameters used by the reduced models.
#pragma once

#include <complex>
#include <string>

#include "pnm/common.hpp"

namespace pnm {

struct ElasticConstants {
  double c11 = 0, c13 = 0, c33 = 0, c44 = 0, c66 = 0;
};

struct ValidationReport {
  bool finite = false;
  bool shear_ok = false;     // 0 < c66 < c11
  bool coupling_ok = false;  // c13^2 < c33 (c11 - c66)
  bool c44_ok = false;       // c44 > 0
  bool valid = false;
  std::string diagnostic;
};

ValidationReport validate(const ElasticConstants& ec);

// Returns ec unchanged if it is elliptic; throws ValidationError otherwise
// (InvalidInput for non-finite entries).
ElasticConstants make_constants(double c11, double c13, double c33, double c44, double c66);

// Isotropic medium with shear modulus mu and Poisson ratio nu.
ElasticConstants from_isotropic(double mu, double nu);

// Constants satisfying the special condition, parameterized by (mu, nu, delta):
// c11 = c33 = 2 mu (1-nu)/(1-2nu), c13 = 2 mu nu/(1-2nu), c44 = mu, c66 = delta mu.
ElasticConstants from_perp(double mu, double nu, double delta);

struct SpecialCondition {
  bool cond_root = false;   // sqrt(c11 c33) - c13 - 2 c44 = 0
  bool cond_equal = false;  // c11 = c33
  bool both() const { return cond_root && cond_equal; }
};

SpecialCondition check_special_condition(const ElasticConstants& ec, double tol_rel = kTolRel);

// Parameters of the perpendicular-slip-plane reduction.
struct DerivedPerp {
  double mu = 0, nu = 0, delta = 0;
  double p = 0, q = 0, b = 0, c = 0;
};

// Fills p, q, b, c from (mu, nu, delta); no admissibility check.
DerivedPerp make_perp(double mu, double nu, double delta);

// True when 0 < delta < 4 and 1 - 2/delta < nu < 1/2.
bool perp_elliptic(double nu, double delta);

DerivedPerp derive_perp(const ElasticConstants& ec, double tol_rel = kTolRel);

// Parameters of the parallel-slip-plane reduction.
struct DerivedParallel {
  double alpha = 0, beta = 0, gamma = 0, delta_ratio = 0;
  double tau = 0;                    // always real under ellipticity
  std::complex<double> tau_tilde;    // imaginary when sqrt(c11 c33) - c13 - 2 c44 < 0
  std::complex<double> theta1, theta2, theta3;
  double eta1 = 0, eta2 = 0;
  bool eta2_positive = false;        // 2x2 symbol matrix positive definite
};

DerivedParallel derive_parallel(const ElasticConstants& ec);

// Only eta1/eta2 enter the case III reduced problem; this builds a record
// from them directly (other fields left zero).
DerivedParallel make_parallel_from_eta(double eta1, double eta2);

}  // namespace pnm
