#include "pnm/moduli.hpp"

#include <cmath>
#include <sstream>

namespace pnm {

const char* to_string(CaseId id) {
  switch (id) {
    case CaseId::CaseI: return "I";
    case CaseId::CaseII: return "II";
    case CaseId::CaseIII: return "III";
  }
  return "?";
}

CaseId case_from_string(const std::string& s) {
  if (s == "I" || s == "1") return CaseId::CaseI;
  if (s == "II" || s == "2") return CaseId::CaseII;
  if (s == "III" || s == "3") return CaseId::CaseIII;
  throw InvalidInput("unknown case '" + s + "' (expected I, II or III)");
}

ValidationReport validate(const ElasticConstants& ec) {
  ValidationReport r;
  r.finite = std::isfinite(ec.c11) && std::isfinite(ec.c13) && std::isfinite(ec.c33) &&
             std::isfinite(ec.c44) && std::isfinite(ec.c66);
  if (!r.finite) {
    r.diagnostic = "non-finite elastic constant";
    return r;
  }
  r.shear_ok = 0.0 < ec.c66 && ec.c66 < ec.c11;
  r.coupling_ok = ec.c13 * ec.c13 < ec.c33 * (ec.c11 - ec.c66);
  r.c44_ok = ec.c44 > 0.0;
  r.valid = r.shear_ok && r.coupling_ok && r.c44_ok;
  std::ostringstream os;
  if (!r.shear_ok) os << "fails 0 < C66 < C11; ";
  if (!r.coupling_ok) os << "fails C13^2 < C33 (C11 - C66); ";
  if (!r.c44_ok) os << "fails C44 > 0; ";
  r.diagnostic = os.str();
  return r;
}

ElasticConstants make_constants(double c11, double c13, double c33, double c44, double c66) {
  ElasticConstants ec{c11, c13, c33, c44, c66};
  auto rep = validate(ec);
  if (!rep.finite) throw InvalidInput(rep.diagnostic);
  if (!rep.valid) throw ValidationError("elastic constants not elliptic: " + rep.diagnostic);
  return ec;
}

ElasticConstants from_isotropic(double mu, double nu) {
  if (!std::isfinite(mu) || !std::isfinite(nu)) throw InvalidInput("non-finite mu or nu");
  const double den = 1.0 - 2.0 * nu;
  if (den == 0.0) throw InvalidInput("nu = 1/2 makes 1 - 2 nu singular");
  const double c11 = 2.0 * mu * (1.0 - nu) / den;
  return {c11, 2.0 * mu * nu / den, c11, mu, mu};
}

ElasticConstants from_perp(double mu, double nu, double delta) {
  ElasticConstants ec = from_isotropic(mu, nu);
  ec.c66 = delta * mu;
  return ec;
}

SpecialCondition check_special_condition(const ElasticConstants& ec, double tol_rel) {
  SpecialCondition s;
  s.cond_root = std::abs(std::sqrt(ec.c11 * ec.c33) - ec.c13 - 2.0 * ec.c44) <= tol_rel * ec.c44;
  s.cond_equal = std::abs(ec.c11 - ec.c33) <= tol_rel * ec.c11;
  return s;
}

DerivedPerp make_perp(double mu, double nu, double delta) {
  DerivedPerp d;
  d.mu = mu;
  d.nu = nu;
  d.delta = delta;
  d.p = delta * (2.0 * (1.0 - nu) - delta * (1.0 - 2.0 * nu));
  d.q = 1.0 - nu;
  d.b = 1.0 + delta;
  d.c = delta * (1.0 - nu * nu);
  return d;
}

bool perp_elliptic(double nu, double delta) {
  return delta > 0.0 && delta < 4.0 && nu > 1.0 - 2.0 / delta && nu < 0.5;
}

DerivedPerp derive_perp(const ElasticConstants& ec, double tol_rel) {
  auto rep = validate(ec);
  if (!rep.finite) throw InvalidInput(rep.diagnostic);
  if (!rep.valid) throw ValidationError("elastic constants not elliptic: " + rep.diagnostic);
  auto sc = check_special_condition(ec, tol_rel);
  if (!sc.both()) {
    std::ostringstream os;
    os << "special condition violated (requires sqrt(C11 C33) - C13 - 2 C44 = 0 and C11 = C33): "
       << "root residual " << std::sqrt(ec.c11 * ec.c33) - ec.c13 - 2.0 * ec.c44
       << ", C11 - C33 = " << ec.c11 - ec.c33;
    throw ValidationError(os.str());
  }
  const double nu = ec.c13 / (2.0 * (ec.c13 + ec.c44));
  return make_perp(ec.c44, nu, ec.c66 / ec.c44);
}

DerivedParallel derive_parallel(const ElasticConstants& ec) {
  auto rep = validate(ec);
  if (!rep.finite) throw InvalidInput(rep.diagnostic);
  if (!rep.valid) throw ValidationError("elastic constants not elliptic: " + rep.diagnostic);
  const double c11 = ec.c11, c13 = ec.c13, c33 = ec.c33, c44 = ec.c44, c66 = ec.c66;
  DerivedParallel d;
  d.alpha = c33 / c44;
  d.beta = c11 / c44;
  const double s = c13 / c44 + 1.0;
  d.gamma = 1.0 + d.alpha * d.beta - s * s;
  d.delta_ratio = c66 / c44;

  const double cbar = std::sqrt(c11 * c33);
  const double den = 2.0 * std::sqrt(c33 * c44);
  // Both factors of tau are nonnegative under ellipticity; tau_tilde's second
  // factor may be negative, making tau_tilde purely imaginary.
  d.tau = std::sqrt(cbar - c13) * std::sqrt(cbar + c13 + 2.0 * c44) / den;
  d.tau_tilde = std::sqrt(std::complex<double>(cbar + c13)) *
                std::sqrt(std::complex<double>(cbar - c13 - 2.0 * c44)) / den;
  d.theta1 = std::sqrt(d.delta_ratio);
  d.theta2 = d.tau + d.tau_tilde;
  d.theta3 = d.tau - d.tau_tilde;

  d.eta1 = 2.0 * std::sqrt(c44 * c66);
  d.eta2 = (c11 - c13 - c44 + c13 * c44 / c33 + cbar * (c33 - c13) * (c44 + c13) / (c33 * c33)) / d.tau;
  d.eta2_positive = d.eta2 > 0.0;
  return d;
}

DerivedParallel make_parallel_from_eta(double eta1, double eta2) {
  DerivedParallel d;
  d.eta1 = eta1;
  d.eta2 = eta2;
  d.eta2_positive = eta2 > 0.0;
  return d;
}

}  // namespace pnm
