// Shared vocabulary types, tolerances and error classes.
#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pnm {

inline constexpr double kPi = std::numbers::pi;

// Relative tolerance for exact-identity checks in double precision.
inline constexpr double kTolRel = 1e-12;

// A point or frequency in the plane. The physical meaning of the two
// coordinates depends on orientation: (x1, x3) for the perpendicular slip
// plane and (x1, x2) for the parallel one.
struct Vec2 {
  double a = 0.0;
  double b = 0.0;

  double norm() const { return std::hypot(a, b); }
};

// Which reduced scalar problem is meant.
//   CaseI   : slip plane perpendicular to the isotropy plane, W = W(u1)
//   CaseII  : slip plane perpendicular to the isotropy plane, W = W(u3)
//   CaseIII : slip plane parallel to the isotropy plane,      W = W(u2)
enum class CaseId { CaseI, CaseII, CaseIII };

const char* to_string(CaseId id);
CaseId case_from_string(const std::string& s);  // accepts I/II/III, 1/2/3

// Rejected input: violates a precondition (exit code 3 at the CLI).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Physically inadmissible material or parameters (exit code 1 at the CLI).
class ValidationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative method failed to reach its tolerance (exit code 2 at the CLI).
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest-round-trip-safe decimal text of a double (printf "%.17g").
inline std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace pnm
