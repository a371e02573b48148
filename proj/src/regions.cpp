#include "pnm/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <tbb/parallel_for.h>

#include "pnm/kernels.hpp"

namespace pnm {

namespace {

struct Case2Conditions {
  double first, second, third;
  bool third_active;
};

Case2Conditions case2_conditions(double p, double q) {
  Case2Conditions c{};
  c.first = 2.0 * (2.0 * p * q - 2.0 * p + q) / (q * q);
  c.second = 2.0 * (p - 2.0 * q + 2.0) / p;
  c.third_active = p <= 0.75 * q || p >= 4.0 * q / 3.0;
  const double s = std::sqrt(p * p + q * q);
  c.third = ((q - 1.0) * (p * p * p + q * q * q + (p * p + q * q) * s) + 4.0 * (1.0 - p) * p * q * q) /
            (2.0 * p * (q - p) * q * q);
  return c;
}

double case1_lower(double delta) {
  const double sd = std::sqrt(delta);
  return std::max(1.0 - 2.0 / delta, 0.5 * sd * (2.0 * delta - 3.0) / (2.0 * delta * sd - 2.0 * sd + 1.0));
}

double case1_upper(double delta) { return 2.0 / (4.0 - delta + std::sqrt(delta * delta + 8.0)); }

double eval_poly(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (double v : c) s = s * x + v;
  return s;
}

}  // namespace

bool in_region_case1(double nu, double delta) {
  if (!perp_elliptic(nu, delta)) return false;
  return case1_lower(delta) < nu && nu < case1_upper(delta);
}

bool in_region_case2(double nu, double delta) {
  if (!perp_elliptic(nu, delta)) return false;
  const DerivedPerp dp = make_perp(1.0, nu, delta);
  const auto c = case2_conditions(dp.p, dp.q);
  if (!(c.first > 0.0 && c.second > 0.0)) return false;
  return !c.third_active || c.third > 0.0;
}

bool in_region_case2_by_root(double nu, double delta) {
  if (!perp_elliptic(nu, delta)) return false;
  const DerivedPerp dp = make_perp(1.0, nu, delta);
  const auto c = case2_conditions(dp.p, dp.q);
  if (!(c.first > 0.0 && c.second > 0.0)) return false;
  if (dp.p <= 0.75 * dp.q && dp.q < 1.0 && dp.q > 0.5) {
    auto r = smallest_positive_root_rtilde(dp.q);
    if (r && !(dp.p > *r)) return false;
  }
  return true;
}

bool in_region_case3_ratio(double eta1, double eta2) {
  if (!(eta2 > 0.0)) return false;
  const double ell = eta1 / eta2;
  return 2.0 / 3.0 < ell && ell < 1.5;
}

bool in_region_case3(const ElasticConstants& ec) {
  if (!validate(ec).valid) return false;
  const DerivedParallel d = derive_parallel(ec);
  return in_region_case3_ratio(d.eta1, d.eta2);
}

std::vector<double> rtilde_polynomial(double q) {
  return {-8.0 * (q - 1.0), -11.0 + 14.0 * q + 13.0 * q * q, 2.0 * q * (1.0 - 18.0 * q + q * q),
          q * q * (13.0 + 14.0 * q - 11.0 * q * q), 8.0 * (q - 1.0) * q * q * q};
}

std::vector<double> real_roots(const std::vector<double>& coeffs) {
  std::vector<double> c = coeffs;
  while (!c.empty() && c.front() == 0.0) c.erase(c.begin());
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) comp(0, j) = -c[j + 1] / c[0];
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    const auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * (1.0 + std::abs(z))) continue;
    double r = z.real();
    // Bisection polish on a small bracket around the eigenvalue estimate.
    const double w = 1e-6 * (1.0 + std::abs(r));
    double a = r - w, b = r + w;
    double fa = eval_poly(c, a), fb = eval_poly(c, b);
    if (fa * fb < 0.0) {
      while (b - a > 1e-12 * (1.0 + std::abs(r))) {
        const double m = 0.5 * (a + b);
        const double fm = eval_poly(c, m);
        if (fa * fm <= 0.0) {
          b = m;
        } else {
          a = m;
          fa = fm;
        }
      }
      r = 0.5 * (a + b);
    }
    out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<double> smallest_positive_root_rtilde(double q) {
  if (!(q > 0.5 && q < 1.0)) throw InvalidInput("r~(q) requires 1/2 < q < 1");
  for (double r : real_roots(rtilde_polynomial(q)))
    if (r > 0.0) return r;
  return std::nullopt;
}

namespace {

ElasticConstants constants_at(const GridSpec& g, double v1, double v2) {
  ElasticConstants ec = g.base;
  auto set = [&](const std::string& name, double v) {
    if (name == "c11") ec.c11 = v;
    else if (name == "c13") ec.c13 = v;
    else if (name == "c33") ec.c33 = v;
    else if (name == "c44") ec.c44 = v;
    else if (name == "c66") ec.c66 = v;
    else throw InvalidInput("case III scan axis must be one of c11, c13, c33, c44, c66, got '" + name + "'");
  };
  set(g.axis1.name, v1);
  set(g.axis2.name, v2);
  return ec;
}

RegionCell scan_cell(const GridSpec& g, double v1, double v2) {
  RegionCell cell;
  cell.axis1 = v1;
  cell.axis2 = v2;
  cell.kmin = std::numeric_limits<double>::quiet_NaN();
  const double tol = kTolRel;
  if (g.region == CaseId::CaseIII) {
    const ElasticConstants ec = constants_at(g, v1, v2);
    if (!validate(ec).valid) return cell;
    const DerivedParallel d = derive_parallel(ec);
    if (!(d.eta2 > 0.0)) return cell;
    cell.admissible = true;
    cell.member = in_region_case3_ratio(d.eta1, d.eta2);
    const double ell = d.eta1 / d.eta2;
    cell.boundary = std::abs(ell - 2.0 / 3.0) <= tol || std::abs(ell - 1.5) <= tol;
    cell.kmin = circle_min(build_kernel_case3(d.eta1, d.eta2)).value;
    return cell;
  }
  const double nu = v1, delta = v2;
  if (!perp_elliptic(nu, delta)) return cell;
  cell.admissible = true;
  const DerivedPerp dp = make_perp(1.0, nu, delta);
  if (g.region == CaseId::CaseI) {
    cell.member = in_region_case1(nu, delta);
    const double scale = std::max(1.0, std::abs(nu));
    cell.boundary = std::abs(nu - case1_lower(delta)) <= tol * scale || std::abs(nu - case1_upper(delta)) <= tol * scale;
    cell.kmin = circle_min(build_kernel_case1(dp)).value;
  } else {
    cell.member = in_region_case2(nu, delta);
    const auto c = case2_conditions(dp.p, dp.q);
    cell.boundary = std::abs(c.first) <= tol || std::abs(c.second) <= tol || (c.third_active && std::abs(c.third) <= tol);
    cell.kmin = circle_min(build_kernel_case2(dp)).value;
  }
  return cell;
}

}  // namespace

RegionScan scan(const GridSpec& spec) {
  if (spec.axis1.n < 1 || spec.axis2.n < 1) throw InvalidInput("region scan needs at least 1 point per axis");
  if (spec.region != CaseId::CaseIII && (spec.axis1.name != "nu" || spec.axis2.name != "delta"))
    throw InvalidInput("case I/II scans use axes (nu, delta)");
  RegionScan s;
  s.spec = spec;
  const int n1 = spec.axis1.n, n2 = spec.axis2.n;
  s.cells.resize(static_cast<std::size_t>(n1) * n2);
  tbb::parallel_for(0, n1 * n2, [&](int idx) {
    const int i = idx / n2, j = idx % n2;
    s.cells[idx] = scan_cell(spec, spec.axis1.at(i), spec.axis2.at(j));
  });
  return s;
}

std::vector<bool> boundary_band(const RegionScan& s) {
  const int n1 = s.spec.axis1.n, n2 = s.spec.axis2.n;
  std::vector<bool> band(s.cells.size(), false);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const RegionCell& c = s.at(i, j);
      if (!c.admissible) continue;
      for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          const int a = i + di, b = j + dj;
          if (a < 0 || b < 0 || a >= n1 || b >= n2) continue;
          const RegionCell& o = s.at(a, b);
          if (o.member != c.member) band[static_cast<std::size_t>(i) * n2 + j] = true;
        }
    }
  return band;
}

std::string region_csv(const RegionScan& s) {
  std::ostringstream os;
  os << "axis1,axis2,member,boundary,kmin\n";
  for (const auto& c : s.cells)
    os << g17(c.axis1) << ',' << g17(c.axis2) << ',' << (c.member ? 1 : 0) << ',' << (c.boundary ? 1 : 0) << ','
       << g17(c.kmin) << '\n';
  return os.str();
}

}  // namespace pnm
