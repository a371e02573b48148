// Input plumbing shared by the command-line front end: flat key = value
// configuration text, material specifications and scan-axis strings.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pnm/moduli.hpp"
#include "pnm/regions.hpp"

namespace pnm {

// Parses `key = value` lines. Blank lines and lines starting with '#' are
// skipped; trailing "# ..." comments are removed; keys are lower-cased with
// '_' mapped to '-'. Malformed lines and duplicate keys raise InvalidInput
// naming the line number.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

// Material given either by the five constants or by (mu, nu, delta), with
// mu defaulting to 1. Mixed or incomplete specifications are rejected.
struct MaterialSpec {
  std::optional<double> c11, c13, c33, c44, c66;
  std::optional<double> mu, nu, delta;

  bool any() const;
  // InvalidInput for incomplete/mixed specs, ValidationError if not elliptic.
  ElasticConstants resolve() const;
};

// "lo:hi:n" (n >= 2) into an axis with the given name.
Axis parse_axis(const std::string& name, const std::string& spec);
// "name:lo:hi:n".
Axis parse_named_axis(const std::string& spec);

// Strict full-string conversion; InvalidInput on trailing garbage.
double parse_double(const std::string& s, const std::string& what);
long parse_long(const std::string& s, const std::string& what);

}  // namespace pnm
