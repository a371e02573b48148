// Kernel-positivity parameter regions and region scans.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnm/common.hpp"
#include "pnm/moduli.hpp"

namespace pnm {

// Case I: closed-form region in the (nu, delta) plane; false outside the
// ellipticity strip.
bool in_region_case1(double nu, double delta);

// Case II: the three closed-form sign conditions (the third applied only
// when p <= 3q/4 or p >= 4q/3); false outside the ellipticity strip.
bool in_region_case2(double nu, double delta);

// Case II via the curve description: first two conditions plus p > r~(q)
// whenever p <= 3q/4 and q < 1. Provided as a cross-check.
bool in_region_case2_by_root(double nu, double delta);

// Case III: eta2 > 0 and 2/3 < eta1/eta2 < 3/2; false for invalid constants.
bool in_region_case3(const ElasticConstants& ec);
bool in_region_case3_ratio(double eta1, double eta2);

// Coefficients (descending powers of x) of the quartic whose smallest
// positive root bounds the case II region.
std::vector<double> rtilde_polynomial(double q);

// Smallest strictly positive real root of the quartic, via companion-matrix
// eigenvalues refined by bisection. Requires 1/2 < q < 1 (else InvalidInput).
std::optional<double> smallest_positive_root_rtilde(double q);

// Real roots of a polynomial with descending coefficients (companion matrix
// eigenvalues, filtered to real, each polished by bisection when bracketed).
std::vector<double> real_roots(const std::vector<double>& coeffs);

struct Axis {
  std::string name;  // nu, delta, or one of c11, c13, c33, c44, c66
  double lo = 0, hi = 0;
  int n = 2;
  double at(int i) const { return n == 1 ? lo : lo + (hi - lo) * i / (n - 1); }
};

struct GridSpec {
  CaseId region = CaseId::CaseI;
  Axis axis1, axis2;
  ElasticConstants base;  // case III: constants not on an axis
};

struct RegionCell {
  double axis1 = 0, axis2 = 0;
  bool admissible = false;
  bool member = false;
  bool boundary = false;  // within tol_rel of a defining inequality
  double kmin = 0;        // NaN when not admissible
};

struct RegionScan {
  GridSpec spec;
  std::vector<RegionCell> cells;  // row-major: axis1 outer, axis2 inner

  const RegionCell& at(int i, int j) const { return cells[static_cast<std::size_t>(i) * spec.axis2.n + j]; }
};

RegionScan scan(const GridSpec& spec);

// Cells whose closed-form membership differs from that of a neighbouring
// admissible cell (8-neighbourhood), i.e. the one-cell band around the
// region boundary.
std::vector<bool> boundary_band(const RegionScan& s);

std::string region_csv(const RegionScan& s);

}  // namespace pnm
