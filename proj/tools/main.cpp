#include "qbind/errors.hpp"
#include "qbind/kinematics.hpp"
#include "qbind/quadrature.hpp"
#include "qbind/studies.hpp"
#include "qbind/variational.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;
using namespace qbind;

//==============================================================================
// Configuration
//==============================================================================

struct Options {
  ModelParams params;
  QuadratureSpec quad;
  double kph_min = 0.05;
  double kph_max = 0.8;
  int kph_steps = 16;
  int grid_n = 64;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string out;
};

//! Command-line values; only keys the user actually passed are set, so they
//! can override a configuration file cleanly.
struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<double> kph_min;
  std::optional<double> kph_max;
  std::optional<int> kph_steps;
  std::optional<int> grid_n;
};

void reject_unknown(const json &obj, const char *section,
                    std::initializer_list<const char *> allowed) {
  if (!obj.is_object())
    throw ConfigError(std::string("config: ") + section +
                      " must be a JSON object");
  for (const auto &item : obj.items()) {
    bool known = false;
    for (const char *key : allowed)
      known = known || item.key() == key;
    if (!known)
      throw ConfigError(std::string("config: unknown key \"") + item.key() +
                        "\" in " + section);
  }
}

template <typename T>
void read_key(const json &obj, const char *key, T &target) {
  if (const auto it = obj.find(key); it != obj.end())
    target = it->get<T>();
}

Options load_config(const std::string &path) {
  Options opt;
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open " + path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  try {
    reject_unknown(root, "the top level",
                   {"params", "quadrature", "sweep", "grid", "seed", "threads",
                    "out"});
    if (root.contains("params")) {
      const json &p = root["params"];
      reject_unknown(p, "params",
                     {"kappa", "sigma", "coupling", "rho_el0", "ell", "c",
                      "hbar", "mu0"});
      read_key(p, "kappa", opt.params.kappa);
      read_key(p, "sigma", opt.params.sigma);
      read_key(p, "coupling", opt.params.coupling);
      read_key(p, "rho_el0", opt.params.rho_el0);
      read_key(p, "ell", opt.params.ell);
      read_key(p, "c", opt.params.c);
      read_key(p, "hbar", opt.params.hbar);
      read_key(p, "mu0", opt.params.mu0);
    }
    if (root.contains("quadrature")) {
      const json &q = root["quadrature"];
      reject_unknown(q, "quadrature",
                     {"radial_order", "angular_order", "rel_tol", "abs_tol",
                      "max_refinements"});
      read_key(q, "radial_order", opt.quad.radial_order);
      read_key(q, "angular_order", opt.quad.angular_order);
      read_key(q, "rel_tol", opt.quad.rel_tol);
      read_key(q, "abs_tol", opt.quad.abs_tol);
      read_key(q, "max_refinements", opt.quad.max_refinements);
    }
    if (root.contains("sweep")) {
      const json &s = root["sweep"];
      reject_unknown(s, "sweep", {"kph_min", "kph_max", "steps"});
      read_key(s, "kph_min", opt.kph_min);
      read_key(s, "kph_max", opt.kph_max);
      read_key(s, "steps", opt.kph_steps);
    }
    if (root.contains("grid")) {
      const json &g = root["grid"];
      reject_unknown(g, "grid", {"n"});
      read_key(g, "n", opt.grid_n);
    }
    read_key(root, "seed", opt.seed);
    read_key(root, "threads", opt.threads);
    read_key(root, "out", opt.out);
  } catch (const json::exception &e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return opt;
}

Options resolve_options(const Flags &f) {
  Options opt = f.config ? load_config(*f.config) : Options{};
  if (f.out)
    opt.out = *f.out;
  if (f.seed)
    opt.seed = *f.seed;
  if (f.threads)
    opt.threads = *f.threads;
  if (f.kph_min)
    opt.kph_min = *f.kph_min;
  if (f.kph_max)
    opt.kph_max = *f.kph_max;
  if (f.kph_steps)
    opt.kph_steps = *f.kph_steps;
  if (f.grid_n)
    opt.grid_n = *f.grid_n;
  opt.params.validate();
  opt.quad.validate();
  return opt;
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw ConfigError("cannot open output file " + path);
  out << text;
  if (!out)
    throw ConfigError("failed writing output file " + path);
}

//! Reports go to --out as JSON when a path is given, otherwise to stdout.
void emit_report(const Options &opt, const json &report) {
  if (opt.out.empty())
    std::cout << report.dump(2) << "\n";
  else
    write_file(opt.out, report.dump(2) + "\n");
}

//==============================================================================
// JSON rendering
//==============================================================================

json to_json(const EnergyBreakdown &e) {
  return {{"e_ph", e.e_ph},
          {"e_el", e.e_el},
          {"e_int", e.e_int},
          {"binding", e.binding}};
}

json to_json(const TheoremReport &r) {
  json integrand = json::array();
  for (const auto &pt : r.integrand)
    integrand.push_back({{"abs_kph", pt[0]}, {"value", pt[1]}});
  return {{"delta", r.delta},
          {"epsilon", r.epsilon},
          {"rho_el0_input", r.rho_el0_input},
          {"rho_el0_used", r.rho_el0_used},
          {"profile",
           {{"delta", r.profile.delta}, {"amplitude", r.profile.amplitude}}},
          {"energy", to_json(r.energy)},
          {"integrand", integrand},
          {"e_el_radial", r.e_el_radial},
          {"e_el_rel_err", r.e_el_rel_err},
          {"binding_negative", r.binding_negative},
          {"integrand_positive", r.integrand_positive},
          {"e_el_consistent", r.e_el_consistent},
          {"pass", r.pass}};
}

json to_json(const MinABoundReport &r) {
  return {{"threshold", r.threshold},
          {"min_random", r.min_random},
          {"min_scan", r.min_scan},
          {"min_overall", r.min_overall},
          {"argmin_abs_k", r.argmin_abs_k},
          {"argmin_abs_kph", r.argmin_abs_kph},
          {"argmin_cos", r.argmin_cos},
          {"corner_parallel", r.corner_parallel},
          {"corner_antiparallel", r.corner_antiparallel},
          {"samples", r.samples},
          {"pass", r.pass}};
}

json to_json(const VerifyReport &r) {
  json checks = json::array();
  for (const auto &c : r.checks)
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"value", c.value},
                      {"bound", c.bound}});
  return {{"checks", checks}, {"pass", r.pass}};
}

json to_json(const AuditReport &r) {
  return {{"zph",
           {{"quoted", r.zph.quoted},
            {"computed", r.zph.computed},
            {"ratio", r.zph.ratio}}},
          {"delta", r.delta},
          {"norm_with_cubed", r.norm_with_cubed},
          {"norm_with_squared", r.norm_with_squared},
          {"a_exact", r.a_exact},
          {"a_scaled", r.a_scaled},
          {"a_unscaled", r.a_unscaled},
          {"continuity_implemented", r.continuity_implemented},
          {"continuity_flipped", r.continuity_flipped},
          {"confirmed", r.confirmed}};
}

json to_json(const RefinementStudy &s) {
  return {{"h", s.h}, {"residual", s.residual}, {"order", s.order}};
}

json to_json(const EmergentReport &r) {
  return {{"gauss", to_json(r.gauss)},
          {"curl", to_json(r.curl)},
          {"curl_pipeline_max", r.curl_pipeline_max},
          {"erf_window", {{"low", r.erf_low}, {"high", r.erf_high}}},
          {"erf_max_rel_err", r.erf_max_rel_err},
          {"continuity", to_json(r.continuity)},
          {"translating_residual", r.translating_residual},
          {"pass", r.pass}};
}

//==============================================================================
// Subcommands
//==============================================================================

int run_sweep(const Options &opt) {
  const auto rows =
      sweep_w(opt.params, opt.quad, opt.kph_min, opt.kph_max, opt.kph_steps,
              opt.threads);
  const std::string csv = sweep_csv(rows);
  if (opt.out.empty())
    std::cout << csv;
  else
    write_file(opt.out, csv);
  return exit_ok;
}

int run_theorem(const Options &opt) {
  const TheoremReport rep = theorem_check(opt.params, opt.quad);
  std::printf("photon ball radius     delta   = %.12e\n", rep.delta);
  std::printf("window scale           epsilon = %.12e\n", rep.epsilon);
  std::printf("peak density used      rho0    = %.12e (input %.6e)\n",
              rep.rho_el0_used, rep.rho_el0_input);
  std::printf("energies  e_ph = %.12e  e_int = %.12e\n", rep.energy.e_ph,
              rep.energy.e_int);
  std::printf("          e_el = %.12e  binding = %.12e\n", rep.energy.e_el,
              rep.energy.binding);
  std::printf("[%s] binding negative\n", rep.binding_negative ? "ok" : "FAIL");
  std::printf("[%s] integrand positive on the photon ball (%zu radii)\n",
              rep.integrand_positive ? "ok" : "FAIL", rep.integrand.size());
  std::printf("[%s] electron energy matches radial reduction (rel err %.3e)\n",
              rep.e_el_consistent ? "ok" : "FAIL", rep.e_el_rel_err);
  emit_report(opt, to_json(rep));
  return rep.pass ? exit_ok : exit_invariant;
}

int run_verify(const Options &opt) {
  const VerifyReport rep = verify_suite(opt.params, opt.quad, opt.seed);
  for (const auto &c : rep.checks)
    std::printf("[%s] %-32s value=%.6e bound=%.6e\n", c.pass ? "ok" : "FAIL",
                c.name.c_str(), c.value, c.bound);
  const MinABoundReport min_a = min_a_bound_check(opt.params, 200000, opt.seed);
  std::printf("[%s] %-32s value=%.6e bound=%.6e\n", min_a.pass ? "ok" : "FAIL",
              "long_wavelength_floor", min_a.min_overall, min_a.threshold);
  const bool pass = rep.pass && min_a.pass;
  json j = to_json(rep);
  j["min_a_bound"] = to_json(min_a);
  j["pass"] = pass;
  emit_report(opt, j);
  return pass ? exit_ok : exit_invariant;
}

int run_audit(const Options &opt) {
  const AuditReport rep = audit_findings(opt.params, opt.quad);
  std::printf("photon-cloud closed form: quoted %.9e vs computed %.9e "
              "(ratio %.6f, expected 2)\n",
              rep.zph.quoted, rep.zph.computed, rep.zph.ratio);
  std::printf("profile normalization: cubic-radius amplitude integrates to "
              "%.12f, quadratic-radius variant to %.6e (= delta)\n",
              rep.norm_with_cubed, rep.norm_with_squared);
  std::printf("long-wavelength factor at c=2: exact %.9f, scaled %.9f, "
              "unscaled %.9f (misses the factor c)\n",
              rep.a_exact, rep.a_scaled, rep.a_unscaled);
  std::printf("continuity residual: implemented sign %.3e, flipped sign %.3f "
              "(expected about 2)\n",
              rep.continuity_implemented, rep.continuity_flipped);
  std::printf("[%s] all audited discrepancies behave as documented\n",
              rep.confirmed ? "ok" : "FAIL");
  emit_report(opt, to_json(rep));
  return rep.confirmed ? exit_ok : exit_invariant;
}

int run_emergent(const Options &opt) {
  if (opt.grid_n < 16 || opt.grid_n % 4 != 0)
    throw ConfigError("emergent: grid n must be a multiple of 4, at least 16");
  const std::vector<int> sizes{opt.grid_n / 2, 3 * opt.grid_n / 4, opt.grid_n};
  const EmergentReport rep = emergent_report(opt.params, opt.seed, sizes);
  for (std::size_t i = 0; i < rep.gauss.h.size(); ++i)
    std::printf("h = %.6f  gauss residual = %.6e  analytic-curl residual = "
                "%.6e\n",
                rep.gauss.h[i], rep.gauss.residual[i], rep.curl.residual[i]);
  std::printf("gauss order %.3f, analytic-curl order %.3f, computed-field "
              "curl <= %.3e\n",
              rep.gauss.order, rep.curl.order, rep.curl_pipeline_max);
  std::printf("erf-window max rel err %.4f on [%.4f, %.4f]\n",
              rep.erf_max_rel_err, rep.erf_low, rep.erf_high);
  std::printf("continuity order %.3f, translating baseline %.3e\n",
              rep.continuity.order, rep.translating_residual);
  std::printf("[%s] emergent field checks\n", rep.pass ? "ok" : "FAIL");
  emit_report(opt, to_json(rep));
  return rep.pass ? exit_ok : exit_invariant;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Variational photon-cloud binding and emergent Coulomb-field "
               "toolkit"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", flags.config, "JSON configuration file");
    cmd->add_option("--out", flags.out, "output file path");
    cmd->add_option("--seed", flags.seed, "seed for sampled checks");
    cmd->add_option("--threads", flags.threads,
                    "worker threads (0 = hardware concurrency)");
  };

  CLI::App *sweep = app.add_subcommand(
      "sweep-w", "CSV sweep of the interaction energy and photon cost over "
                 "|k_ph|");
  add_common(sweep);
  sweep->add_option("--kph-min", flags.kph_min, "smallest photon momentum");
  sweep->add_option("--kph-max", flags.kph_max, "largest photon momentum");
  sweep->add_option("--kph-steps", flags.kph_steps, "number of radii");

  CLI::App *theorem = app.add_subcommand(
      "theorem", "end-to-end negative-binding construction on the small "
                 "photon ball");
  add_common(theorem);

  CLI::App *verify = app.add_subcommand(
      "verify", "symmetry, sign and consistency checks of the coupling "
                "amplitudes and integrals");
  add_common(verify);

  CLI::App *audit = app.add_subcommand(
      "audit", "cross-checks of quoted closed forms that disagree with "
               "direct evaluation");
  add_common(audit);

  CLI::App *emergent = app.add_subcommand(
      "emergent", "grid studies of the emergent Coulomb field of a charge "
                  "blob");
  add_common(emergent);
  emergent->add_option("--grid-n", flags.grid_n,
                       "finest grid size (study runs n/2, 3n/4, n)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return exit_config;
  }

  try {
    const Options opt = resolve_options(flags);
    if (sweep->parsed())
      return run_sweep(opt);
    if (theorem->parsed())
      return run_theorem(opt);
    if (verify->parsed())
      return run_verify(opt);
    if (audit->parsed())
      return run_audit(opt);
    if (emergent->parsed())
      return run_emergent(opt);
    return exit_config;
  } catch (const ConfigError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const DomainError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config;
  } catch (const ConvergenceError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_convergence;
  } catch (const InvariantError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invariant;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_invariant;
  }
}
