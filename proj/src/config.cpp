#include "pnm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace pnm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidInput("config line " + std::to_string(no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw InvalidInput("config line " + std::to_string(no) + ": empty key or value");
    if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'') && val.back() == val.front())
      val = val.substr(1, val.size() - 2);
    for (char& c : key) {
      c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (c == '_') c = '-';
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-'))
        throw InvalidInput("config line " + std::to_string(no) + ": invalid key '" + key + "'");
    }
    if (!seen.insert(key).second) throw InvalidInput("config line " + std::to_string(no) + ": duplicate key '" + key + "'");
    out.emplace_back(key, val);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidInput("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

bool MaterialSpec::any() const { return c11 || c13 || c33 || c44 || c66 || mu || nu || delta; }

ElasticConstants MaterialSpec::resolve() const {
  const int nc = !!c11 + !!c13 + !!c33 + !!c44 + !!c66;
  const bool perp = nu || delta || mu;
  if (nc > 0 && perp) throw InvalidInput("give either the five constants c11..c66 or (mu, nu, delta), not both");
  if (nc == 5) return make_constants(*c11, *c13, *c33, *c44, *c66);
  if (nc > 0) throw InvalidInput("all five constants c11, c13, c33, c44, c66 are required");
  if (nu && delta) {
    const ElasticConstants ec = from_perp(mu.value_or(1.0), *nu, *delta);
    const ValidationReport r = validate(ec);
    if (!r.valid) throw ValidationError("(mu, nu, delta) gives non-elliptic constants: " + r.diagnostic);
    return ec;
  }
  throw InvalidInput("material not specified: give c11..c66 or nu and delta (and optionally mu)");
}

double parse_double(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw InvalidInput("invalid number for " + what + ": '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  long v = 0;
  const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size())
    throw InvalidInput("invalid integer for " + what + ": '" + s + "'");
  return v;
}

Axis parse_axis(const std::string& name, const std::string& spec) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(spec);
  while (std::getline(is, cur, ':')) parts.push_back(cur);
  if (parts.size() != 3) throw InvalidInput("axis '" + name + "' must be lo:hi:n, got '" + spec + "'");
  Axis a;
  a.name = name;
  a.lo = parse_double(parts[0], name + " lower bound");
  a.hi = parse_double(parts[1], name + " upper bound");
  const long n = parse_long(parts[2], name + " count");
  if (n < 1 || n > 100000) throw InvalidInput("axis '" + name + "' count must be in [1, 100000]");
  if (n > 1 ? !(a.hi > a.lo) : !(a.hi >= a.lo)) throw InvalidInput("axis '" + name + "' needs hi > lo");
  a.n = static_cast<int>(n);
  return a;
}

Axis parse_named_axis(const std::string& spec) {
  const auto c = spec.find(':');
  if (c == std::string::npos) throw InvalidInput("axis must be name:lo:hi:n, got '" + spec + "'");
  std::string name = spec.substr(0, c);
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return parse_axis(name, spec.substr(c + 1));
}

}  // namespace pnm
