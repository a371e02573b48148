// Command-line front end: validate, region, symbol, kernel, solve, extend, verify.
//
// Exit codes: 0 success, 1 validation failure, 2 numerical non-convergence,
// 3 bad input.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <tbb/global_control.h>

#include "pnm/config.hpp"
#include "pnm/extension.hpp"
#include "pnm/kernels.hpp"
#include "pnm/moduli.hpp"
#include "pnm/regions.hpp"
#include "pnm/solver.hpp"
#include "pnm/symbols.hpp"

using json = nlohmann::ordered_json;
using namespace pnm;

namespace {

constexpr int kExitOk = 0, kExitValidation = 1, kExitConvergence = 2, kExitInput = 3;

// Options shared by all subcommands.
struct Common {
  std::string config;
  int threads = 0;
  unsigned long seed = 12345;
  std::string case_id = "I";
  std::string out = "-";
  MaterialSpec mat;
  double c11 = NAN, c13 = NAN, c33 = NAN, c44 = NAN, c66 = NAN, mu = NAN, nu = NAN, delta = NAN;

  void resolve_material() {
    auto set = [](std::optional<double>& o, double v) {
      if (!std::isnan(v)) o = v;
    };
    set(mat.c11, c11);
    set(mat.c13, c13);
    set(mat.c33, c33);
    set(mat.c44, c44);
    set(mat.c66, c66);
    set(mat.mu, mu);
    set(mat.nu, nu);
    set(mat.delta, delta);
  }
};

void add_common(CLI::App* sub, Common& c, bool with_out = true) {
  sub->add_option("--config", c.config, "flat key = value configuration file (flags override it)");
  sub->add_option("--threads", c.threads, "cap on worker threads (0 = library default)");
  sub->add_option("--seed", c.seed, "seed for randomized checks");
  sub->add_option("--case", c.case_id, "reduced problem: I, II or III");
  sub->add_option("--c11", c.c11);
  sub->add_option("--c13", c.c13);
  sub->add_option("--c33", c.c33);
  sub->add_option("--c44", c.c44);
  sub->add_option("--c66", c.c66);
  sub->add_option("--mu", c.mu, "shear modulus (with --nu, --delta)");
  sub->add_option("--nu", c.nu, "Poisson-type ratio");
  sub->add_option("--delta", c.delta, "shear anisotropy ratio c66/c44");
  if (with_out) sub->add_option("--out", c.out, "output file ('-' for standard output)");
}

// Writes CSV to the requested destination; returns the stream to use for the
// summary (stderr when the CSV occupies stdout).
std::ostream& write_output(const std::string& out, const std::string& text) {
  if (out == "-") {
    std::cout << text;
    std::cout.flush();
    return std::cerr;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InvalidInput("cannot write '" + out + "'");
  f << text;
  if (!f) throw InvalidInput("failed writing '" + out + "'");
  return std::cout;
}

ModelCase model_case(const Common& c) {
  const CaseId id = case_from_string(c.case_id);
  return make_case(id, c.mat.resolve());
}

json case_json(const ModelCase& mc) {
  json j;
  j["case"] = to_string(mc.id);
  if (mc.id == CaseId::CaseIII) {
    j["eta1"] = mc.parallel.eta1;
    j["eta2"] = mc.parallel.eta2;
  } else {
    j["mu"] = mc.perp.mu;
    j["nu"] = mc.perp.nu;
    j["delta"] = mc.perp.delta;
    j["p"] = mc.perp.p;
    j["q"] = mc.perp.q;
  }
  j["in_region"] = case_in_region(mc);
  return j;
}

// ---------------------------------------------------------------------------

int run_validate(Common& c) {
  const ElasticConstants ec = [&] {
    // Validation reports rather than throws on non-elliptic constants.
    const bool any_c = c.mat.c11 || c.mat.c13 || c.mat.c33 || c.mat.c44 || c.mat.c66;
    if (any_c && (c.mat.mu || c.mat.nu || c.mat.delta)) return c.mat.resolve();
    if (c.mat.c11 && c.mat.c13 && c.mat.c33 && c.mat.c44 && c.mat.c66)
      return ElasticConstants{*c.mat.c11, *c.mat.c13, *c.mat.c33, *c.mat.c44, *c.mat.c66};
    if (c.mat.nu && c.mat.delta) return from_perp(c.mat.mu.value_or(1.0), *c.mat.nu, *c.mat.delta);
    return c.mat.resolve();
  }();
  const ValidationReport r = validate(ec);
  if (!r.finite) throw InvalidInput("elastic constants must be finite");
  const SpecialCondition sc = check_special_condition(ec);
  std::cout << "elliptic: " << (r.valid ? "true" : "false") << ", special: " << (sc.both() ? "true" : "false") << '\n';
  json j;
  j["elliptic"] = r.valid;
  j["special"] = sc.both();
  j["c11"] = ec.c11;
  j["c13"] = ec.c13;
  j["c33"] = ec.c33;
  j["c44"] = ec.c44;
  j["c66"] = ec.c66;
  if (!r.valid) j["diagnostic"] = r.diagnostic;
  if (r.valid && sc.both()) {
    const DerivedPerp dp = derive_perp(ec);
    j["perp"] = {{"mu", dp.mu}, {"nu", dp.nu}, {"delta", dp.delta}, {"p", dp.p}, {"q", dp.q}, {"b", dp.b}, {"c", dp.c}};
    j["region_I"] = in_region_case1(dp.nu, dp.delta);
    j["region_II"] = in_region_case2(dp.nu, dp.delta);
  }
  if (r.valid) {
    const DerivedParallel d = derive_parallel(ec);
    j["parallel"] = {{"eta1", d.eta1}, {"eta2", d.eta2}, {"eta2_positive", d.eta2_positive}};
    j["region_III"] = in_region_case3(ec);
  }
  std::cout << j.dump() << '\n';
  return r.valid ? kExitOk : kExitValidation;
}

int run_region(Common& c, const std::string& nu_range, const std::string& delta_range, const std::string& ax1,
               const std::string& ax2) {
  GridSpec g;
  g.region = case_from_string(c.case_id);
  if (g.region == CaseId::CaseIII) {
    if (ax1.empty() || ax2.empty()) throw InvalidInput("case III scans need --axis1 and --axis2 (name:lo:hi:n)");
    g.axis1 = parse_named_axis(ax1);
    g.axis2 = parse_named_axis(ax2);
    // Base constants: all five given; axis values override the base.
    ElasticConstants b;
    auto pick = [](const std::optional<double>& o) { return o.value_or(NAN); };
    b = {pick(c.mat.c11), pick(c.mat.c13), pick(c.mat.c33), pick(c.mat.c44), pick(c.mat.c66)};
    auto fill = [&](const std::string& n, double v) {
      if (n == "c11") b.c11 = v;
      else if (n == "c13") b.c13 = v;
      else if (n == "c33") b.c33 = v;
      else if (n == "c44") b.c44 = v;
      else if (n == "c66") b.c66 = v;
    };
    fill(g.axis1.name, g.axis1.lo);
    fill(g.axis2.name, g.axis2.lo);
    if (!std::isfinite(b.c11) || !std::isfinite(b.c13) || !std::isfinite(b.c33) || !std::isfinite(b.c44) ||
        !std::isfinite(b.c66))
      throw InvalidInput("case III scans need the constants not on an axis");
    g.base = b;
  } else {
    if (nu_range.empty() || delta_range.empty()) throw InvalidInput("case I/II scans need --nu-range and --delta-range");
    g.axis1 = parse_axis("nu", nu_range);
    g.axis2 = parse_axis("delta", delta_range);
  }
  const RegionScan s = scan(g);
  std::ostream& os = write_output(c.out, region_csv(s));
  std::size_t adm = 0, mem = 0, bnd = 0;
  for (const auto& cell : s.cells) {
    adm += cell.admissible;
    mem += cell.member;
    bnd += cell.boundary;
  }
  json j;
  j["case"] = to_string(g.region);
  j["rows"] = s.cells.size();
  j["admissible"] = adm;
  j["members"] = mem;
  j["boundary"] = bnd;
  os << j.dump() << '\n';
  return kExitOk;
}

int run_symbol(Common& c, int n_theta) {
  if (n_theta < 1) throw InvalidInput("--n-theta must be positive");
  const ModelCase mc = model_case(c);
  std::ostringstream csv;
  csv << "theta,m\n";
  double mn = INFINITY, mx = -INFINITY;
  for (int i = 0; i < n_theta; ++i) {
    const double th = kPi * i / n_theta;
    const double m = eval_symbol(mc, {std::cos(th), std::sin(th)});
    mn = std::min(mn, m);
    mx = std::max(mx, m);
    csv << g17(th) << ',' << g17(m) << '\n';
  }
  std::ostream& os = write_output(c.out, csv.str());
  json j = case_json(mc);
  j["min"] = mn;
  j["max"] = mx;
  os << j.dump() << '\n';
  return kExitOk;
}

int run_kernel(Common& c, int n_theta, bool verify) {
  if (n_theta < 1) throw InvalidInput("--n-theta must be positive");
  const ModelCase mc = model_case(c);
  const KernelForm kf = build_kernel(mc);
  std::ostringstream csv;
  json j = case_json(mc);
  bool ok = true;
  if (verify) {
    csv << "theta,residual\n";
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double th = 2.0 * kPi * (i + 0.5) / 100.0;
      const double r = pde_residual(kf, {std::cos(th), std::sin(th)});
      worst = std::max(worst, r);
      csv << g17(th) << ',' << g17(r) << '\n';
    }
    j["max_residual"] = worst;
    j["tolerance"] = 1e-6;
    ok = worst <= 1e-6;
    j["pass"] = ok;
  } else {
    csv << "theta,k\n";
    for (const auto& [th, k] : circle_profile(kf, n_theta)) csv << g17(th) << ',' << g17(k) << '\n';
    const CircleMin cm = circle_min(kf);
    j["kmin"] = cm.value;
    j["theta_min"] = cm.theta;
  }
  std::ostream& os = write_output(c.out, csv.str());
  os << j.dump() << '\n';
  return ok ? kExitOk : kExitValidation;
}

struct SolveArgs {
  double theta = 0.0, X = 200.0, tol = 1e-10, scale = 1.0, init_scale = 1.0, init_shift = 0.0;
  int N = 4096, n_eig = 3;
  std::string method = "newton", potential = "oracle";
  bool no_stability = false;
};

int run_solve(Common& c, const SolveArgs& a) {
  const ModelCase mc = model_case(c);
  if (!(std::abs(a.theta) < 0.5 * kPi)) throw InvalidInput("--theta must lie in (-pi/2, pi/2)");
  const double m_e = eval_symbol(mc, {std::cos(a.theta), std::sin(a.theta)});
  std::unique_ptr<Potential> W;
  if (a.potential == "oracle") {
    if (!(m_e > 0.0)) throw ValidationError("symbol value m(e) must be positive");
    W = std::make_unique<Potential>(Potential::arctan_oracle(m_e));
  } else if (a.potential == "cosine") {
    W = std::make_unique<Potential>(Potential::periodic_cosine(a.scale));
  } else if (a.potential == "quartic") {
    W = std::make_unique<Potential>(Potential::quartic(a.scale));
  } else {
    throw InvalidInput("--potential must be oracle, cosine or quartic");
  }
  ProfileOptions opt;
  opt.X = a.X;
  opt.N = a.N;
  opt.tol = a.tol;
  opt.init_scale = a.init_scale;
  opt.init_shift = a.init_shift;
  if (a.method == "newton") opt.method = SolveMethod::Newton;
  else if (a.method == "flow" || a.method == "gradient-flow") opt.method = SolveMethod::GradientFlow;
  else throw InvalidInput("--method must be newton or flow");

  ProfileSolution sol = solve_profile(mc, *W, a.theta, opt);
  json j = case_json(mc);
  j["theta"] = sol.theta;
  j["m_e"] = sol.m_e;
  j["potential"] = W->name();
  j["potential_scale"] = W->scale();
  j["X"] = sol.X;
  j["N"] = sol.N;
  j["residual"] = sol.residual;
  j["center"] = sol.center;
  j["flow_steps"] = sol.flow_steps;
  j["newton_steps"] = sol.newton_steps;
  if (!a.no_stability) {
    const StabilityReport st = check_stability(sol, *W, a.n_eig);
    j["lambda_min"] = sol.lambda_min;
    j["eigenvalues"] = st.eigenvalues;
    j["stable"] = st.stable;
  }
  if (a.potential == "oracle") {
    double err = 0.0;
    for (int i = 0; i < sol.N; ++i) err = std::max(err, std::abs(sol.psi[i] - (2.0 / kPi) * std::atan(sol.x[i])));
    j["linf_error_vs_arctan"] = err;
  }
  std::ostream& os = write_output(c.out, profile_csv(sol));
  os << j.dump() << '\n';
  return kExitOk;
}

struct ExtendArgs {
  std::string orientation;
  double L = 2.0 * kPi, hn = 0.05, amp_a = 1.0, amp_b = 0.0;
  int N = 16, layers = 64, mode_a = 1, mode_b = 0;
  std::string dump;
};

void write_dump(const std::string& path, const Field3D& f) {
  std::ofstream o(path, std::ios::binary);
  if (!o) throw InvalidInput("cannot write '" + path + "'");
  json h;
  h["format"] = "float64-le";
  h["orientation"] = to_string(f.orient);
  h["order"] = {"side", "component", "layer", "i", "j"};
  h["sides"] = {"upper", "lower"};
  h["components"] = {"u1", "u2", "u3"};
  h["dims"] = {2, 3, f.layers, f.N1, f.N2};
  h["spacings"] = {{"normal", f.hn}, {"tangential_1", f.L1 / f.N1}, {"tangential_2", f.L2 / f.N2}};
  o << h.dump() << '\n';
  for (int side = 0; side < 2; ++side)
    for (int c = 0; c < 3; ++c)
      for (double v : (side == 0 ? f.upper : f.lower)[c]) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
        char b[8];
        for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((bits >> (8 * k)) & 0xff);
        o.write(b, 8);
      }
  if (!o) throw InvalidInput("failed writing '" + path + "'");
}

int run_extend(Common& c, const ExtendArgs& a) {
  Orientation o;
  if (a.orientation.empty()) o = case_from_string(c.case_id) == CaseId::CaseIII ? Orientation::Parallel : Orientation::Perp;
  else if (a.orientation == "perp") o = Orientation::Perp;
  else if (a.orientation == "parallel") o = Orientation::Parallel;
  else throw InvalidInput("--orientation must be perp or parallel");
  if (!(a.L > 0.0)) throw InvalidInput("--L must be positive");
  const ElasticConstants ec = c.mat.resolve();

  BoundaryData bd;
  bd.orient = o;
  bd.L1 = bd.L2 = a.L;
  bd.N1 = bd.N2 = a.N;
  bd.ta.resize(static_cast<std::size_t>(a.N) * a.N);
  bd.tb.resize(bd.ta.size());
  const double ka = 2.0 * kPi * a.mode_a / a.L, kb = 2.0 * kPi * a.mode_b / a.L;
  for (int i = 0; i < a.N; ++i)
    for (int j = 0; j < a.N; ++j) {
      const double x1 = -0.5 * a.L + i * a.L / a.N, x2 = -0.5 * a.L + j * a.L / a.N;
      const double ph = std::cos(ka * x1 + kb * x2);
      bd.ta[static_cast<std::size_t>(i) * a.N + j] = a.amp_a * ph;
      bd.tb[static_cast<std::size_t>(i) * a.N + j] = a.amp_b * ph;
    }
  const Field3D f = extend(ec, bd, a.hn, a.layers);

  // Normal profile at the in-plane origin, lower side first.
  std::ostringstream csv;
  csv << "normal,u1,u2,u3\n";
  const int i0 = a.N / 2, j0 = a.N / 2;
  for (int l = a.layers - 1; l >= 0; --l)
    csv << g17(-l * a.hn) << ',' << g17(f.lower[0][f.index(l, i0, j0)]) << ',' << g17(f.lower[1][f.index(l, i0, j0)])
        << ',' << g17(f.lower[2][f.index(l, i0, j0)]) << '\n';
  for (int l = 0; l < a.layers; ++l)
    csv << g17(l * a.hn) << ',' << g17(f.upper[0][f.index(l, i0, j0)]) << ',' << g17(f.upper[1][f.index(l, i0, j0)])
        << ',' << g17(f.upper[2][f.index(l, i0, j0)]) << '\n';
  std::ostream& os = write_output(c.out, csv.str());
  if (!a.dump.empty()) write_dump(a.dump, f);

  json j;
  j["orientation"] = to_string(o);
  j["layers"] = a.layers;
  j["hn"] = a.hn;
  if (a.mode_a != 0 || a.mode_b != 0) {
    const HalfSpaceSystem s = build_halfspace(o, ec, {ka, kb});
    json ev = json::array();
    for (const auto& cl : s.clusters)
      ev.push_back({{"re", cl.value.real()}, {"im", cl.value.imag()}, {"algebraic", cl.algebraic}, {"geometric", cl.geometric}});
    j["eigenvalues"] = ev;
    j["jordan"] = s.jordan;
  }
  double emin = INFINITY;
  for (bool up : {true, false}) {
    const StressStrain ss = stress_strain(f, ec, up);
    for (double e : ss.energy_density) emin = std::min(emin, e);
  }
  j["min_energy_density"] = emin;
  os << j.dump() << '\n';
  return emin >= -1e-12 ? kExitOk : kExitValidation;
}

// Property suite: kernel PDEs, isotropic collapse, symbol forms, duality and
// region cross-checks. One line per check; nonzero exit on any violation.
int run_verify(Common& c) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
  int failures = 0;
  json results = json::array();
  auto report = [&](const std::string& name, double value, double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    failures += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << " value=" << g17(value) << " tol=" << g17(tol) << '\n';
    results.push_back({{"check", name}, {"value", value}, {"tol", tol}, {"pass", ok}});
  };

  const DerivedPerp p1 = derive_perp(from_perp(1.0, 0.2, 1.5));
  const DerivedPerp p2 = derive_perp(from_perp(1.0, 0.2, 1.3));
  const ElasticConstants e3{5.0, 1.5, 4.5, 1.2, 1.6};
  const DerivedParallel d3 = derive_parallel(e3);
  const std::vector<std::pair<std::string, KernelForm>> kernels = {
      {"I", build_kernel_case1(p1)}, {"II", build_kernel_case2(p2)}, {"III", build_kernel_case3(d3.eta1, d3.eta2)}};

  for (const auto& [name, kf] : kernels) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double th = ang(rng);
      worst = std::max(worst, pde_residual(kf, {std::cos(th), std::sin(th)}));
    }
    report("kernel_pde_case_" + name, worst, 1e-6);
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double th = ang(rng);
      const Vec2 k{std::cos(th), std::sin(th)};
      auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
      worst = std::max(worst, rel(symbol_case1_from_matrix(p1, k), symbol_case1(p1, k)));
      worst = std::max(worst, rel(symbol_case2_from_matrix(p2, k), symbol_case2(p2, k)));
      worst = std::max(worst, rel(symbol_case3_from_matrix(d3, k), symbol_case3(d3, k)));
    }
    report("symbol_closed_form_vs_matrix", worst, 1e-10);
  }

  {
    const ModelCase m1{CaseId::CaseI, p1, {}}, m2{CaseId::CaseII, p2, {}};
    ModelCase m3;
    m3.id = CaseId::CaseIII;
    m3.parallel = d3;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double th = ang(rng);
      const Vec2 k{std::cos(th), std::sin(th)};
      for (const ModelCase* mc : std::initializer_list<const ModelCase*>{&m1, &m2, &m3}) {
        const double a = symbol_from_kernel(build_kernel(*mc), k), b = eval_symbol(*mc, k);
        worst = std::max(worst, std::abs(a - b) / b);
      }
    }
    report("kernel_symbol_duality", worst, 1e-8);
  }

  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double th = ang(rng);
      const Vec2 z{std::cos(th), std::sin(th)};
      const double mu = 1.0, nu = 0.25;
      const DerivedPerp d = derive_perp(from_isotropic(mu, nu));
      const KernelForm iso = build_kernel_isotropic(mu, d.q);
      const double k1 = eval_kernel(build_kernel_case1(d), z), ref1 = eval_kernel(iso, z);
      const double k2 = eval_kernel(build_kernel_case2(d), z), ref2 = eval_kernel(iso, {z.b, z.a});
      worst = std::max({worst, std::abs(k1 - ref1) / std::abs(ref1), std::abs(k2 - ref2) / std::abs(ref2)});
    }
    report("isotropic_collapse", worst, 1e-10);
  }

  {
    GridSpec g;
    g.region = CaseId::CaseII;
    g.axis1 = {"nu", -0.99, 0.49, 50};
    g.axis2 = {"delta", 0.05, 3.95, 50};
    int mism = 0;
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) {
        const double nu = g.axis1.at(i), de = g.axis2.at(j);
        if (!perp_elliptic(nu, de)) continue;
        mism += in_region_case2(nu, de) != in_region_case2_by_root(nu, de);
      }
    report("region_case_II_conditions_vs_root", mism, 0);

    g.region = CaseId::CaseI;
    const RegionScan s = scan(g);
    const auto band = boundary_band(s);
    int bad = 0;
    for (std::size_t k = 0; k < s.cells.size(); ++k) {
      const auto& cell = s.cells[k];
      if (!cell.admissible || band[k] || cell.boundary) continue;
      bad += cell.member != (cell.kmin > 0.0);
    }
    report("region_case_I_vs_circle_min", bad, 0);
  }

  json j;
  j["checks"] = results;
  j["failures"] = failures;
  std::cout << j.dump() << '\n';
  return failures == 0 ? kExitOk : kExitValidation;
}

// Applies config-file entries as if they had been given before the
// command-line arguments, so explicit flags take precedence.
std::vector<std::string> expand_config(const std::vector<std::string>& args, CLI::App& app) {
  std::string sub_name, cfg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (sub_name.empty() && !args[i].empty() && args[i][0] != '-') sub_name = args[i];
    if (args[i] == "--config" && i + 1 < args.size()) cfg = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) cfg = args[i].substr(9);
  }
  if (cfg.empty() || sub_name.empty()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(sub_name);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::vector<std::string> injected;
  for (const auto& [key, val] : parse_config_file(cfg)) {
    if (key == "config") throw InvalidInput("config files cannot include other config files");
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw InvalidInput("unknown config key '" + key + "' for subcommand '" + sub_name + "'");
    if (opt->get_expected_min() == 0) {
      if (val == "true" || val == "1" || val == "yes") injected.push_back("--" + key);
      else if (!(val == "false" || val == "0" || val == "no"))
        throw InvalidInput("config key '" + key + "' expects true or false");
    } else {
      injected.push_back("--" + key);
      injected.push_back(val);
    }
  }
  std::vector<std::string> out;
  bool placed = false;
  for (const auto& a : args) {
    out.push_back(a);
    if (!placed && a == sub_name) {
      out.insert(out.end(), injected.begin(), injected.end());
      placed = true;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced Peierls-Nabarro model toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Common common;
  std::string nu_range, delta_range, axis1, axis2;
  int n_theta = 360;
  bool verify_flag = false;
  SolveArgs sa;
  ExtendArgs ea;

  auto* v = app.add_subcommand("validate", "check ellipticity and the special condition");
  add_common(v, common, false);

  auto* r = app.add_subcommand("region", "scan a kernel-positivity region into CSV");
  add_common(r, common);
  r->add_option("--nu-range", nu_range, "lo:hi:n");
  r->add_option("--delta-range", delta_range, "lo:hi:n");
  r->add_option("--axis1", axis1, "case III: name:lo:hi:n with name in c11, c13, c33, c44, c66");
  r->add_option("--axis2", axis2, "case III: name:lo:hi:n");

  auto* s = app.add_subcommand("symbol", "symbol trace m(cos t, sin t) on [0, pi)");
  add_common(s, common);
  s->add_option("--n-theta", n_theta, "number of angles");

  auto* k = app.add_subcommand("kernel", "kernel circle profile on [0, pi), or PDE residual table");
  add_common(k, common);
  k->add_option("--n-theta", n_theta, "number of angles");
  k->add_flag("--verify", verify_flag, "print the PDE residual table instead");

  auto* so = app.add_subcommand("solve", "1D profile of the reduced equation");
  add_common(so, common);
  so->add_option("--theta", sa.theta, "direction angle in (-pi/2, pi/2)");
  so->add_option("--X", sa.X, "half-width of the computational interval");
  so->add_option("--N", sa.N, "grid points (power of two)");
  so->add_option("--tol", sa.tol, "L2 residual tolerance");
  so->add_option("--method", sa.method, "newton or flow");
  so->add_option("--potential", sa.potential, "oracle, cosine or quartic");
  so->add_option("--scale", sa.scale, "potential amplitude (cosine, quartic)");
  so->add_option("--init-scale", sa.init_scale, "initial guess phi(s (x - x0)): s");
  so->add_option("--init-shift", sa.init_shift, "initial guess phi(s (x - x0)): x0");
  so->add_option("--n-eig", sa.n_eig, "number of linearization eigenvalues");
  so->add_flag("--no-stability", sa.no_stability, "skip the eigenvalue computation");

  auto* e = app.add_subcommand("extend", "3D extension of single-mode slip-plane data");
  add_common(e, common);
  e->add_option("--orientation", ea.orientation, "perp or parallel (default from --case)");
  e->add_option("--L", ea.L, "slip-plane cell length");
  e->add_option("--N", ea.N, "slip-plane grid points per direction");
  e->add_option("--mode-a", ea.mode_a, "integer wave number along the first tangential axis");
  e->add_option("--mode-b", ea.mode_b, "integer wave number along the second tangential axis");
  e->add_option("--amp-a", ea.amp_a, "amplitude of the first tangential displacement");
  e->add_option("--amp-b", ea.amp_b, "amplitude of the second tangential displacement");
  e->add_option("--hn", ea.hn, "normal grid step");
  e->add_option("--layers", ea.layers, "layers per side");
  e->add_option("--dump", ea.dump, "binary dump of the field (JSON header line + float64 LE)");

  auto* ve = app.add_subcommand("verify", "run the property suite");
  add_common(ve, common, false);

  std::unique_ptr<tbb::global_control> threads;
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(args, app);
    std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp& ex) {
      return app.exit(ex);
    } catch (const CLI::ParseError& ex) {
      app.exit(ex);
      return kExitInput;
    }
    common.resolve_material();
    if (common.threads < 0) throw InvalidInput("--threads must be >= 0");
    if (common.threads > 0)
      threads = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                      static_cast<std::size_t>(common.threads));
    if (v->parsed()) return run_validate(common);
    if (r->parsed()) return run_region(common, nu_range, delta_range, axis1, axis2);
    if (s->parsed()) return run_symbol(common, n_theta);
    if (k->parsed()) return run_kernel(common, n_theta, verify_flag);
    if (so->parsed()) return run_solve(common, sa);
    if (e->parsed()) return run_extend(common, ea);
    if (ve->parsed()) return run_verify(common);
    return kExitInput;
  } catch (const ValidationError& ex) {
    std::cerr << "validation error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const ConvergenceError& ex) {
    std::cerr << "convergence error: " << ex.what() << '\n';
    return kExitConvergence;
  } catch (const InvalidInput& ex) {
    std::cerr << "invalid input: " << ex.what() << '\n';
    return kExitInput;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitInput;
  }
}
