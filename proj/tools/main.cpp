#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "revuz/assumptions.hpp"
#include "revuz/estimators.hpp"
#include "revuz/measure.hpp"
#include "revuz/report_io.hpp"
#include "revuz/rng.hpp"
#include "revuz/scenario.hpp"
#include "revuz/verify.hpp"

namespace {

using namespace revuz;

struct Options {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t paths = 100000;
  std::vector<double> alpha_grid;
  std::vector<double> t_grid;
  std::string out;
  double tolerance = 1e-10;

  std::string measure;
  std::string nu = "lebesgue";
  std::string x_label;
  double horizon = 0.0;
  double epsilon = 0.0;
  std::size_t trace = 0;
  std::vector<std::string> suites{"all"};
  double inject_fault = 0.0;

  std::string command;
  std::string digest;
};

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--scenario", o.scenario,
                  "Built-in scenario name or path to a scenario JSON file")
      ->required();
  cmd->add_option("--seed", o.seed, "Root RNG seed (default 0)");
  cmd->add_option("--paths", o.paths, "Monte Carlo replica count per cell");
  cmd->add_option("--alpha-grid", o.alpha_grid,
                  "Override the scenario alpha grid");
  cmd->add_option("--t-grid", o.t_grid, "Override the scenario time grid");
  cmd->add_option("--out", o.out,
                  "Output directory (default: print to stdout)");
  cmd->add_option("--tolerance", o.tolerance,
                  "Residual tolerance for exact identities");
}

// Everything the run depends on, in flag order, so reruns of one command
// line stamp identical digests into their outputs.
std::string config_digest(const Options& o) {
  std::ostringstream s;
  s << "command=" << o.command << " scenario=" << o.scenario
    << " seed=" << o.seed << " paths=" << o.paths << " alpha-grid=";
  for (double a : o.alpha_grid) s << fmt_double(a) << ",";
  s << " t-grid=";
  for (double t : o.t_grid) s << fmt_double(t) << ",";
  s << " tolerance=" << fmt_double(o.tolerance) << " measure=" << o.measure
    << " nu=" << o.nu << " x=" << o.x_label << " T=" << fmt_double(o.horizon)
    << " epsilon=" << fmt_double(o.epsilon) << " trace=" << o.trace
    << " suites=";
  for (const auto& name : o.suites) s << name << ",";
  s << " inject-fault=" << fmt_double(o.inject_fault);
  return hex_digest(fnv1a64(s.str()));
}

struct Sink {
  std::string dir;

  void emit(const std::string& filename, const std::string& content,
            bool echo_when_dir = false) const {
    if (dir.empty()) {
      std::cout << content;
      return;
    }
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / filename;
    write_text_file(path.string(), content);
    if (echo_when_dir) std::cout << content;
  }
};

Scenario load(const Options& o) {
  try {
    return load_scenario(o.scenario);
  } catch (const IoError& e) {
    std::string msg = e.what();
    const auto names = builtin_scenarios();
    if (!names.empty()) {
      msg += " (built-ins:";
      for (const auto& n : names) msg += " " + n;
      msg += ")";
    }
    throw IoError(msg);
  }
}

const std::vector<double>& pick_grid(const std::vector<double>& flag,
                                     const std::vector<double>& fallback) {
  return flag.empty() ? fallback : flag;
}

// --measure, else the family limit, else the first measure declared in the
// scenario file, else Lebesgue.
const std::string& pick_measure_name(const Scenario& sc, const Options& o) {
  if (!o.measure.empty()) return o.measure;
  if (!sc.family_limit.empty()) return sc.family_limit;
  for (const auto& [name, mu] : sc.measures) {
    if (name != "lebesgue" && name != "zero") return name;
  }
  static const std::string kLebesgue = "lebesgue";
  return kLebesgue;
}

Index pick_x(const Scenario& sc, const Options& o) {
  return o.x_label.empty() ? sc.x : sc.chain.index_of(o.x_label);
}

double pick_horizon(const Scenario& sc, const Options& o) {
  if (o.horizon == 0.0) return sc.horizon;
  if (!(o.horizon > 0.0)) throw BadParameter("-T must be positive");
  return o.horizon;
}

double pick_epsilon(const Scenario& sc, const Options& o) {
  if (o.epsilon == 0.0) return sc.epsilon;
  if (!(o.epsilon > 0.0)) throw BadParameter("--epsilon must be positive");
  return o.epsilon;
}

std::vector<Index> all_states(const Chain& chain) {
  std::vector<Index> xs(static_cast<std::size_t>(chain.size()));
  for (Index i = 0; i < chain.size(); ++i) xs[static_cast<std::size_t>(i)] = i;
  return xs;
}

std::string csv_comment(const Options& o, const Scenario& sc) {
  std::ostringstream s;
  s << "# command=" << o.command << " scenario=" << sc.name
    << " seed=" << o.seed << " config=" << o.digest << "\n";
  return s.str();
}

void emit_report(const Sink& sink, const Options& o,
                 const VerifyReport& report, const std::string& stem) {
  if (sink.dir.empty()) {
    std::cout << to_text(report) << "\n";
    return;
  }
  sink.emit(stem + ".txt", to_text(report));
  sink.emit(stem + ".json", to_json_string(report));
  sink.emit(stem + ".csv", to_csv(report, o.digest));
  std::cout << "suite=" << report.suite << " scenario=" << report.scenario
            << " => " << (report.pass ? "PASS" : "FAIL") << "\n";
}

int cmd_spec_check(const Options& o) {
  const Scenario sc = load(o);
  const Chain& chain = sc.chain;
  std::cout << "scenario " << sc.name << ": " << chain.size() << " states, "
            << (chain.conservative() ? "conservative" : "with killing")
            << ", spectral bottom " << fmt_double(chain.spectral_bottom())
            << ", " << sc.measures.size() << " measures, family of "
            << sc.family.size() << ", " << sc.nests.size() << " nests\n";
  if (!sc.nests.empty()) validate_nests(chain, sc.nests);

  KernelCheckOptions kopts;
  kopts.tolerance = o.tolerance;
  kopts.has_fault = o.inject_fault != 0.0;
  kopts.fault = o.inject_fault;
  const VerifyReport report = verify_kernel_identities(
      chain, pick_grid(o.t_grid, sc.t_grid),
      pick_grid(o.alpha_grid, sc.alpha_grid), kopts, sc.name);

  Sink sink{o.out};
  if (!sink.dir.empty()) {
    emit_report(sink, o, report, "kernels");
  } else {
    std::cout << to_text(report);
  }
  return report.pass ? 0 : 3;
}

int cmd_potential(const Options& o) {
  const Scenario sc = load(o);
  const std::string& mu_name = pick_measure_name(sc, o);
  const MeasureVec& mu = sc.measure(mu_name);

  std::ostringstream csv;
  csv << csv_comment(o, sc);
  csv << "alpha,measure,state,value\n";
  for (double alpha : pick_grid(o.alpha_grid, sc.alpha_grid)) {
    const PotentialVec u = potential(sc.chain, alpha, mu);
    for (Index x = 0; x < sc.chain.size(); ++x) {
      csv << fmt_double(alpha) << ',' << mu_name << ',' << sc.chain.label(x)
          << ',' << fmt_double(u.values(x)) << "\n";
    }
  }
  Sink{o.out}.emit("potential.csv", csv.str());
  return 0;
}

int cmd_simulate(const Options& o) {
  const Scenario sc = load(o);
  const Chain& chain = sc.chain;
  const std::string& mu_name = pick_measure_name(sc, o);
  const MeasureVec& mu = sc.measure(mu_name);
  const Index x = pick_x(sc, o);
  const double horizon = pick_horizon(sc, o);

  std::ostringstream csv;
  csv << csv_comment(o, sc);

  if (o.trace > 0) {
    const Vector f = density(chain, mu);
    csv << "path,t,state,pcaf\n";
    for (std::size_t p = 0; p < o.trace; ++p) {
      const PathRecord path = sample_path(
          chain, x, horizon,
          derive_stream(o.seed, {static_cast<std::uint64_t>(p)}));
      const PCAFSeries series = pcaf_along(path, f);
      for (std::size_t i = 0; i < series.breakpoints.size(); ++i) {
        const double t = series.breakpoints[i];
        csv << p << ',' << fmt_double(t) << ','
            << (path.killed() && t >= path.lifetime
                    ? "dead"
                    : chain.label(path.state_at(t)))
            << ',' << fmt_double(series.values[i]) << "\n";
      }
    }
    Sink{o.out}.emit("trace.csv", csv.str());
    return 0;
  }

  csv << "alpha,measure,x,exact,estimate,std_error,z\n";
  const Vector ones = Vector::Ones(chain.size());
  const auto& alphas = pick_grid(o.alpha_grid, sc.alpha_grid);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double alpha = alphas[i];
    const double exact = potential(chain, alpha, mu).values(x);
    const MCEstimate est = mc_revuz_functional(
        chain, x, alpha, ones, mu, o.paths,
        derive_stream(o.seed, {static_cast<std::uint64_t>(i)}));
    const double z = est.std_error > 0.0
                         ? (est.mean - exact) / est.std_error
                         : (est.mean == exact ? 0.0 : HUGE_VAL);
    csv << fmt_double(alpha) << ',' << mu_name << ',' << chain.label(x) << ','
        << fmt_double(exact) << ',' << fmt_double(est.mean) << ','
        << fmt_double(est.std_error) << ',' << fmt_double(z) << "\n";
  }
  Sink{o.out}.emit("simulate.csv", csv.str());
  return 0;
}

int cmd_verify(const Options& o) {
  const Scenario sc = load(o);
  const Chain& chain = sc.chain;
  const auto& alpha_grid = pick_grid(o.alpha_grid, sc.alpha_grid);
  const auto& t_grid = pick_grid(o.t_grid, sc.t_grid);
  const double horizon = pick_horizon(sc, o);
  const double epsilon = pick_epsilon(sc, o);

  struct Suite {
    std::string name;
    bool applicable;
    std::string reason;
    std::function<VerifyReport(std::uint64_t)> run;
  };

  std::vector<std::pair<std::string, MeasureVec>> named(sc.measures.begin(),
                                                        sc.measures.end());
  const std::string& mu_name = pick_measure_name(sc, o);

  std::vector<Suite> suites;
  suites.push_back(
      {"kernels", true, "", [&](std::uint64_t seed) {
         (void)seed;
         KernelCheckOptions kopts;
         kopts.tolerance = o.tolerance;
         kopts.has_fault = o.inject_fault != 0.0;
         kopts.fault = o.inject_fault;
         return verify_kernel_identities(chain, t_grid, alpha_grid, kopts,
                                         sc.name);
       }});
  suites.push_back({"revuz", true, "", [&](std::uint64_t seed) {
                      return verify_revuz(chain, make_revuz_cases(chain, named),
                                          o.paths, seed, sc.name);
                    }});
  suites.push_back(
      {"kac", chain.strictly_sub_markov(),
       "needs a strictly sub-Markov chain (add killing)",
       [&](std::uint64_t seed) {
         std::vector<KacCase> cases;
         const Index mid = chain.size() / 2;
         for (const auto& [name, m] : named) {
           cases.push_back({"x=" + chain.label(0) + " mu=" + name +
                                " nu=" + name,
                            0, m, m});
           cases.push_back({"x=" + chain.label(mid) + " mu=" + name +
                                " nu=lebesgue",
                            mid, m, sc.measure("lebesgue")});
         }
         return verify_kac(chain, cases, o.paths, seed, sc.name);
       }});
  suites.push_back(
      {"supdiff", true, "", [&](std::uint64_t seed) {
         return verify_supdiff_bound(chain, sc.measure(mu_name),
                                     sc.measure(o.nu), alpha_grid, t_grid,
                                     all_states(chain), o.paths, seed,
                                     sc.name);
       }});
  suites.push_back(
      {"moments", !sc.family.empty(), "scenario declares no measure family",
       [&](std::uint64_t seed) {
         return verify_moment_convergence(chain, sc.family, sc.limit_measure(),
                                          horizon, all_states(chain), o.paths,
                                          seed, sc.name);
       }});
  suites.push_back(
      {"ucp",
       !sc.family.empty() && !sc.nests.empty() && chain.conservative(),
       "needs a measure family, nests, and a conservative chain",
       [&](std::uint64_t seed) {
         return verify_ucp_convergence(chain, sc.family, sc.limit_measure(),
                                       sc.nests, horizon, epsilon, sc.x,
                                       o.paths, seed, sc.name);
       }});

  std::set<std::string> requested(o.suites.begin(), o.suites.end());
  const bool run_all = requested.count("all") > 0;
  requested.erase("all");
  for (const auto& name : requested) {
    bool known = false;
    for (const auto& s : suites) known = known || s.name == name;
    if (!known) throw ParseError("unknown suite '" + name + "'");
  }

  Sink sink{o.out};
  bool all_pass = true;
  bool ran_any = false;
  for (std::size_t i = 0; i < suites.size(); ++i) {
    const Suite& suite = suites[i];
    const bool wanted = run_all || requested.count(suite.name) > 0;
    if (!wanted) continue;
    if (!suite.applicable) {
      if (requested.count(suite.name) > 0) {
        throw BadParameter("suite '" + suite.name + "' does not apply to '" +
                           sc.name + "': " + suite.reason);
      }
      std::cout << "suite=" << suite.name << " scenario=" << sc.name
                << " => skipped (" << suite.reason << ")\n";
      continue;
    }
    const VerifyReport report =
        suite.run(derive_stream(o.seed, {static_cast<std::uint64_t>(i)}));
    emit_report(sink, o, report, suite.name);
    all_pass = all_pass && report.pass;
    ran_any = true;
  }
  if (!ran_any) throw BadParameter("no verification suite was run");
  return all_pass ? 0 : 3;
}

int cmd_converge(const Options& o) {
  const Scenario sc = load(o);
  const Chain& chain = sc.chain;
  const MeasureVec& limit = sc.limit_measure();
  const Index x = pick_x(sc, o);
  const double horizon = pick_horizon(sc, o);
  const double epsilon = pick_epsilon(sc, o);
  const std::vector<double> bound_grid = default_bound_alpha_grid();

  std::ostringstream csv;
  csv << csv_comment(o, sc);
  csv << "n,label,gap_sup,gap_ess,moment,moment_stderr,bound,prob,"
         "prob_stderr\n";
  for (std::size_t n = 0; n < sc.family.size(); ++n) {
    const MeasureVec& mu_n = sc.family[n];
    const PotentialGap gap = potential_gap(chain, 1.0, mu_n, limit);
    const MCEstimate moment = mc_sup_diff_moment(
        chain, x, horizon, mu_n, limit, o.paths,
        derive_stream(o.seed, {static_cast<std::uint64_t>(n), 0}));
    double bound = HUGE_VAL;
    for (double alpha : bound_grid) {
      bound =
          std::min(bound, supdiff_bound_rhs(chain, mu_n, limit, alpha, horizon));
    }
    const UcpCell cell = mc_ucp_cell(
        chain, x, horizon, mu_n, limit, sc.nests, epsilon, o.paths,
        derive_stream(o.seed, {static_cast<std::uint64_t>(n), 1}));
    csv << n << ',' << sc.family_labels[n] << ','
        << fmt_double(gap.sup_norm) << ',' << fmt_double(gap.ess_sup_norm)
        << ',' << fmt_double(moment.mean) << ','
        << fmt_double(moment.std_error) << ',' << fmt_double(bound) << ','
        << fmt_double(cell.prob.mean) << ',' << fmt_double(cell.prob.std_error)
        << "\n";
  }
  Sink{o.out}.emit("converge.csv", csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Potential-theory laboratory for symmetric Markov chains: exact "
      "kernels, additive-functional simulation, and verification suites"};
  app.require_subcommand(1);

  Options o;
  auto* spec_check = app.add_subcommand(
      "spec-check", "Validate a scenario and run the kernel identity checks");
  auto* potential_cmd = app.add_subcommand(
      "potential", "Tabulate alpha-potentials U_alpha(mu) per state");
  auto* simulate = app.add_subcommand(
      "simulate", "Sample paths and PCAF estimator rows");
  auto* verify = app.add_subcommand(
      "verify", "Run verification suites and write reports");
  auto* converge = app.add_subcommand(
      "converge", "Per-member convergence table for the measure family");

  for (auto* cmd : {spec_check, potential_cmd, simulate, verify, converge}) {
    add_common_flags(cmd, o);
    cmd->add_option("--inject-fault", o.inject_fault,
                    "Corrupt one heat-kernel entry by this amount (test hook)")
        ->group("");
  }
  for (auto* cmd : {potential_cmd, simulate, verify}) {
    cmd->add_option("--measure", o.measure, "Measure name for the PCAF");
  }
  verify->add_option("--nu", o.nu, "Second measure for the sup-diff suite");
  verify->add_option("--suite", o.suites,
                     "Suites to run: kernels revuz kac supdiff moments ucp "
                     "all (default all)");
  for (auto* cmd : {simulate, verify, converge}) {
    cmd->add_option("--x", o.x_label, "Starting state label");
    cmd->add_option("-T,--horizon", o.horizon, "Time horizon");
  }
  for (auto* cmd : {verify, converge}) {
    cmd->add_option("--epsilon", o.epsilon,
                    "Deviation threshold for probability rows");
  }
  simulate->add_option("--trace", o.trace,
                       "Dump this many path traces instead of estimating");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (spec_check->parsed()) o.command = "spec-check";
    if (potential_cmd->parsed()) o.command = "potential";
    if (simulate->parsed()) o.command = "simulate";
    if (verify->parsed()) o.command = "verify";
    if (converge->parsed()) o.command = "converge";
    o.digest = config_digest(o);

    if (o.command == "spec-check") return cmd_spec_check(o);
    if (o.command == "potential") return cmd_potential(o);
    if (o.command == "simulate") return cmd_simulate(o);
    if (o.command == "verify") return cmd_verify(o);
    return cmd_converge(o);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
