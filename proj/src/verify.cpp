#include "revuz/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "revuz/kernels.hpp"

namespace revuz {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

VerifyRow residual_row(std::string label, double residual, double tolerance) {
  return VerifyRow{std::move(label), residual, nan_v,  nan_v,
                   tolerance,        nan_v,    tolerance - residual,
                   residual <= tolerance};
}

VerifyRow equality_row(std::string label, double exact,
                       const MCEstimate& est) {
  const double diff = std::abs(est.mean - exact);
  const double band = 3.0 * est.std_error;
  return VerifyRow{std::move(label), exact,       est.mean, est.std_error,
                   nan_v,            nan_v,       band - diff,
                   diff <= band};
}

void finalize(VerifyReport& report) {
  report.pass = true;
  for (const VerifyRow& row : report.rows) report.pass &= row.pass;
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<Index> middle_half(const Chain& chain) {
  const Index n = chain.size();
  if (n <= 2) return {0};
  const Index lo = n / 4;
  const Index len = std::max<Index>(1, n / 2);
  std::vector<Index> out;
  for (Index i = lo; i < std::min(n, lo + len); ++i) out.push_back(i);
  return out;
}

}  // namespace

VerifyReport verify_kernel_identities(const Chain& chain,
                                      const std::vector<double>& t_grid,
                                      const std::vector<double>& alpha_grid,
                                      const KernelCheckOptions& options,
                                      const std::string& scenario) {
  if (t_grid.empty() || alpha_grid.empty()) {
    throw BadParameter("verify_kernel_identities needs nonempty grids");
  }
  VerifyReport report;
  report.suite = "kernel-identities";
  report.scenario = scenario;
  report.tolerance = options.tolerance;
  const double tol = options.tolerance;

  std::vector<double> times = t_grid;
  std::sort(times.begin(), times.end());
  const Vector& m = chain.m();
  const Index n = chain.size();

  std::vector<Matrix> heat;
  heat.reserve(times.size());
  for (double t : times) heat.push_back(heat_kernel(chain, t).values);
  if (options.has_fault && !heat.empty()) {
    heat.front()(0, std::min<Index>(1, n - 1)) += options.fault;
    report.notes.push_back("fault injected into p_{t=" +
                           short_num(times.front()) + "}");
  }

  for (std::size_t i = 0; i < times.size(); ++i) {
    report.rows.push_back(residual_row(
        "heat-symmetry t=" + short_num(times[i]),
        max_abs(heat[i] - heat[i].transpose()), tol));
  }

  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = i; j < times.size(); ++j) {
      const Matrix lhs = heat_kernel(chain, times[i] + times[j]).values;
      const Matrix rhs = heat[i] * m.asDiagonal() * heat[j];
      report.rows.push_back(residual_row(
          "ck t=" + short_num(times[i]) + " s=" + short_num(times[j]),
          max_abs(lhs - rhs), tol));
    }
  }

  for (std::size_t i = 0; i < times.size(); ++i) {
    const Vector mass = heat[i] * m;
    double excess = 0.0;
    double defect = 0.0;
    for (Index x = 0; x < n; ++x) {
      excess = std::max(excess, mass(x) - 1.0);
      defect = std::max(defect, std::abs(mass(x) - 1.0));
    }
    report.rows.push_back(residual_row(
        "substochastic t=" + short_num(times[i]), excess, tol));
    if (chain.conservative()) {
      report.rows.push_back(residual_row(
          "conservation t=" + short_num(times[i]), defect, tol));
    }
  }

  for (std::size_t i = 0; i < times.size(); ++i) {
    double worst = 0.0;
    for (Index x = 0; x < n; ++x) {
      for (Index y = 0; y < n; ++y) {
        if (x == y) continue;
        worst = std::max(worst, heat[i](x, y) - std::sqrt(heat[i](x, x) *
                                                          heat[i](y, y)));
      }
    }
    report.rows.push_back(
        residual_row("offdiag-bound t=" + short_num(times[i]), worst, tol));
  }

  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    double worst = 0.0;
    for (Index x = 0; x < n; ++x) {
      worst = std::max(worst, heat[i + 1](x, x) - heat[i](x, x));
    }
    report.rows.push_back(residual_row(
        "ondiag-monotone t=" + short_num(times[i]) + "->" +
            short_num(times[i + 1]),
        worst, tol));
  }

  const std::vector<Index> part =
      options.part_subset.empty() ? middle_half(chain)
                                  : canonical_subset(chain, options.part_subset);
  const Chain sub = part_chain(chain, part);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix part_heat = heat_kernel(sub, times[i]).values;
    double worst = 0.0;
    for (Index a = 0; a < sub.size(); ++a) {
      for (Index b = 0; b < sub.size(); ++b) {
        worst = std::max(
            worst, part_heat(a, b) -
                       heat[i](part[static_cast<std::size_t>(a)],
                               part[static_cast<std::size_t>(b)]));
      }
    }
    report.rows.push_back(residual_row(
        "part-dominance t=" + short_num(times[i]), worst, tol));
  }

  std::vector<double> alphas = alpha_grid;
  std::sort(alphas.begin(), alphas.end());
  std::vector<Matrix> res;
  res.reserve(alphas.size());
  for (double a : alphas) res.push_back(resolvent_kernel(chain, a).values);

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      const double beta = alphas[i];
      const double alpha = alphas[j];
      const Matrix residual =
          res[i] - res[j] - (alpha - beta) * (res[i] * m.asDiagonal() * res[j]);
      report.rows.push_back(residual_row(
          "resolvent-identity a=" + short_num(alpha) + " b=" + short_num(beta),
          max_abs(residual), tol));
    }
  }

  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (!(alphas[i] > 0.0)) continue;
    const Vector mass = res[i] * m;
    double excess = 0.0;
    for (Index x = 0; x < n; ++x) {
      excess = std::max(excess, mass(x) - 1.0 / alphas[i]);
    }
    report.rows.push_back(residual_row(
        "resolvent-mass a=" + short_num(alphas[i]), excess, tol));
  }

  finalize(report);
  return report;
}

std::vector<RevuzCase> make_revuz_cases(
    const Chain& chain,
    const std::vector<std::pair<std::string, MeasureVec>>& measures) {
  const Index n = chain.size();
  const Index center = n / 2;
  std::vector<Index> starts = {0};
  if (center != 0) starts.push_back(center);
  Vector ones = Vector::Ones(n);
  Vector indicator = Vector::Zero(n);
  indicator(center) = 1.0;
  const std::vector<std::pair<std::string, Vector>> tests = {
      {"g=1", ones}, {"g=1_{" + chain.label(center) + "}", indicator}};

  std::vector<RevuzCase> cases;
  for (const auto& [mu_name, mu] : measures) {
    for (Index x : starts) {
      for (double alpha : {0.5, 1.0, 2.0}) {
        for (const auto& [g_name, g] : tests) {
          cases.push_back(RevuzCase{
              "x=" + chain.label(x) + " a=" + short_num(alpha) + " " + g_name +
                  " mu=" + mu_name,
              x, alpha, g, mu});
        }
      }
    }
  }
  return cases;
}

VerifyReport verify_revuz(const Chain& chain,
                          const std::vector<RevuzCase>& cases,
                          std::size_t n_paths, std::uint64_t seed,
                          const std::string& scenario) {
  if (cases.empty()) throw BadParameter("verify_revuz needs cases");
  VerifyReport report;
  report.suite = "revuz";
  report.scenario = scenario;
  report.seed = seed;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const RevuzCase& kase = cases[c];
    const Kernel r = resolvent_kernel(chain, kase.alpha);
    const double exact =
        r.values.row(kase.x).dot(
            (kase.g.array() * kase.mu.weights.array()).matrix());
    const MCEstimate est = mc_revuz_functional(
        chain, kase.x, kase.alpha, kase.g, kase.mu, n_paths,
        derive_stream(seed, {static_cast<std::uint64_t>(c)}));
    report.rows.push_back(equality_row(kase.label, exact, est));
  }
  report.notes.push_back("two-sided acceptance |estimate - exact| <= 3 sigma");
  finalize(report);
  return report;
}

VerifyReport verify_kac(const Chain& chain, const std::vector<KacCase>& cases,
                        std::size_t n_paths, std::uint64_t seed,
                        const std::string& scenario) {
  if (cases.empty()) throw BadParameter("verify_kac needs cases");
  if (!chain.strictly_sub_markov()) {
    throw ConservativeChain("Kac products need strictly positive killing");
  }
  VerifyReport report;
  report.suite = "kac-moment";
  report.scenario = scenario;
  report.seed = seed;
  const Kernel r0 = resolvent_kernel(chain, 0.0);
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const KacCase& kase = cases[c];
    const Vector u_mu = r0.values * kase.mu.weights;
    const Vector u_nu = r0.values * kase.nu.weights;
    const double exact =
        r0.values.row(kase.x).dot(
            (u_mu.array() * kase.nu.weights.array()).matrix()) +
        r0.values.row(kase.x).dot(
            (u_nu.array() * kase.mu.weights.array()).matrix());
    const MCEstimate est = mc_product_infinity(
        chain, kase.x, kase.mu, kase.nu, n_paths,
        derive_stream(seed, {static_cast<std::uint64_t>(c)}));
    report.rows.push_back(equality_row(kase.label, exact, est));
  }
  report.notes.push_back(
      "exact reference: int r_0(x,.) U_0 mu d nu + int r_0(x,.) U_0 nu d mu");
  finalize(report);
  return report;
}

double supdiff_bound_rhs(const Chain& chain, const MeasureVec& mu,
                         const MeasureVec& nu, double alpha, double t_max) {
  if (!(alpha > 0.0)) throw NegativeAlpha("bound needs alpha > 0");
  if (!(t_max > 0.0)) throw NonpositiveTime("bound needs T > 0");
  const double u_mu = potential(chain, alpha, mu).values.maxCoeff();
  const double u_nu = potential(chain, alpha, nu).values.maxCoeff();
  const double gap = potential_gap(chain, alpha, mu, nu).sup_norm;
  const double u1_mu = potential(chain, 1.0, mu).values.maxCoeff();
  const double u1_nu = potential(chain, 1.0, nu).values.maxCoeff();
  return 18.0 * (u_mu + u_nu) * gap +
         4.0 * std::exp(2.0 * t_max) * (-std::expm1(-alpha * t_max)) *
             (u1_mu * u1_mu + u1_nu * u1_nu);
}

std::vector<double> default_bound_alpha_grid() {
  std::vector<double> grid;
  for (int e = -6; e <= 4; ++e) grid.push_back(std::ldexp(1.0, e));
  return grid;
}

VerifyReport verify_supdiff_bound(const Chain& chain, const MeasureVec& mu,
                                  const MeasureVec& nu,
                                  const std::vector<double>& alpha_grid,
                                  const std::vector<double>& t_grid,
                                  const std::vector<Index>& x_set,
                                  std::size_t n_paths, std::uint64_t seed,
                                  const std::string& scenario) {
  if (alpha_grid.empty() || t_grid.empty() || x_set.empty()) {
    throw BadParameter("verify_supdiff_bound needs nonempty grids");
  }
  VerifyReport report;
  report.suite = "supdiff-bound";
  report.scenario = scenario;
  report.seed = seed;

  const std::size_t per_x = std::max<std::size_t>(1, n_paths / x_set.size());
  // moments[xi][ti]: one estimate per (x, T); the bound's alpha does not
  // enter the left side.
  std::vector<std::vector<MCEstimate>> moments(x_set.size());
  for (std::size_t xi = 0; xi < x_set.size(); ++xi) {
    moments[xi] = mc_sup_diff_moment_multi(
        chain, x_set[xi], t_grid, mu, nu, per_x,
        derive_stream(seed, {static_cast<std::uint64_t>(xi)}));
  }

  for (double alpha : alpha_grid) {
    for (std::size_t ti = 0; ti < t_grid.size(); ++ti) {
      const double rhs = supdiff_bound_rhs(chain, mu, nu, alpha, t_grid[ti]);
      std::size_t best = 0;
      for (std::size_t xi = 0; xi < x_set.size(); ++xi) {
        const MCEstimate& est = moments[xi][ti];
        const double margin = rhs - (est.mean - 3.0 * est.std_error);
        report.rows.push_back(VerifyRow{
            "a=" + short_num(alpha) + " T=" + short_num(t_grid[ti]) + " x=" +
                chain.label(x_set[xi]),
            nan_v, est.mean, est.std_error, rhs,
            rhs > 0.0 ? est.mean / rhs : nan_v, margin, margin >= 0.0});
        if (est.mean > moments[best][ti].mean) best = xi;
      }
      const MCEstimate& top = moments[best][ti];
      const double margin = rhs - (top.mean - 3.0 * top.std_error);
      report.rows.push_back(VerifyRow{
          "a=" + short_num(alpha) + " T=" + short_num(t_grid[ti]) +
              " max-x=" + chain.label(x_set[best]),
          nan_v, top.mean, top.std_error, rhs,
          rhs > 0.0 ? top.mean / rhs : nan_v, margin, margin >= 0.0});
    }
  }
  report.notes.push_back(
      "one-sided acceptance: max_x estimate - 3 sigma <= exact bound; "
      "paths per starting state: " +
      std::to_string(per_x));
  finalize(report);
  return report;
}

VerifyReport verify_moment_convergence(
    const Chain& chain, const std::vector<MeasureVec>& mus,
    const MeasureVec& mu, double t_max, const std::vector<Index>& x_set,
    std::size_t n_paths, std::uint64_t seed, const std::string& scenario,
    const MomentConvergenceOptions& options) {
  if (mus.empty()) throw BadParameter("measure sequence is empty");
  if (x_set.empty()) throw BadParameter("x_set is empty");
  if (!(t_max > 0.0)) throw NonpositiveTime("needs T > 0");
  VerifyReport report;
  report.suite = "moment-convergence";
  report.scenario = scenario;
  report.seed = seed;

  const TrendReport assumption = check_assumption_strong(chain, mus, mu);
  if (!assumption.satisfied) {
    report.notes.push_back(
        "assumption-not-verified: the gap sequence fails the strong "
        "assumption rule; running anyway");
  }

  const std::vector<double> alphas = options.bound_alpha_grid.empty()
                                         ? default_bound_alpha_grid()
                                         : options.bound_alpha_grid;
  const std::size_t per_x = std::max<std::size_t>(1, n_paths / x_set.size());

  std::vector<MCEstimate> tops;
  std::vector<std::string> top_labels;
  std::vector<double> bounds;
  for (std::size_t ni = 0; ni < mus.size(); ++ni) {
    MCEstimate top;
    Index top_x = x_set.front();
    bool first = true;
    for (std::size_t xi = 0; xi < x_set.size(); ++xi) {
      const MCEstimate est = mc_sup_diff_moment(
          chain, x_set[xi], t_max, mus[ni], mu, per_x,
          derive_stream(seed, {static_cast<std::uint64_t>(ni),
                               static_cast<std::uint64_t>(xi)}));
      if (first || est.mean > top.mean) {
        top = est;
        top_x = x_set[xi];
        first = false;
      }
    }
    double bound = std::numeric_limits<double>::infinity();
    for (double alpha : alphas) {
      bound = std::min(bound, supdiff_bound_rhs(chain, mus[ni], mu, alpha,
                                                t_max));
    }
    tops.push_back(top);
    top_labels.push_back("n=" + std::to_string(ni + 1) +
                         " max-x=" + chain.label(top_x));
    bounds.push_back(bound);
  }

  for (std::size_t ni = 0; ni < mus.size(); ++ni) {
    double margin = 0.0;
    bool pass = true;
    if (ni > 0) {
      const double band =
          3.0 * std::hypot(tops[ni].std_error, tops[ni - 1].std_error);
      margin = tops[ni - 1].mean + band - tops[ni].mean;
      pass = margin >= 0.0;
    }
    report.rows.push_back(VerifyRow{top_labels[ni], nan_v, tops[ni].mean,
                                    tops[ni].std_error, bounds[ni],
                                    bounds[ni] > 0.0
                                        ? tops[ni].mean / bounds[ni]
                                        : nan_v,
                                    margin, pass});
  }

  {
    const double first = tops.front().mean;
    const double last = tops.back().mean;
    const double cap = options.final_fraction * first;
    const double margin = cap - last;
    report.rows.push_back(VerifyRow{"final<=" +
                                        short_num(options.final_fraction) +
                                        "*first",
                                    first, last, tops.back().std_error, cap,
                                    nan_v, margin, margin >= 0.0});
  }
  {
    double worst = 0.0;
    const double scale =
        std::max(1.0, *std::max_element(bounds.begin(), bounds.end()));
    for (std::size_t ni = 1; ni < bounds.size(); ++ni) {
      worst = std::max(worst, bounds[ni] - bounds[ni - 1]);
    }
    report.rows.push_back(
        residual_row("bound-monotone", worst, 1e-12 * scale));
  }
  report.notes.push_back(
      "bound column: min over alpha grid of the sup-diff inequality right "
      "side; moment rows accepted when nonincreasing within 3 sigma");
  finalize(report);
  return report;
}

VerifyReport verify_ucp_convergence(
    const Chain& chain, const std::vector<MeasureVec>& mus,
    const MeasureVec& mu, const std::vector<std::vector<Index>>& nests,
    double t_max, double epsilon, Index x, std::size_t n_paths,
    std::uint64_t seed, const std::string& scenario,
    const UcpOptions& options) {
  if (mus.empty()) throw BadParameter("measure sequence is empty");
  if (!chain.conservative()) {
    throw NotConservative("ucp suite needs a conservative chain");
  }
  validate_nests(chain, nests);
  if (x < 0 || x >= chain.size()) throw InvalidSubset("state out of range");

  VerifyReport report;
  report.suite = "ucp-convergence";
  report.scenario = scenario;
  report.seed = seed;
  report.tolerance = options.prob_tolerance;

  const bool last_is_full =
      canonical_subset(chain, nests.back()).size() ==
      static_cast<std::size_t>(chain.size());

  std::vector<MCEstimate> probs;
  for (std::size_t ni = 0; ni < mus.size(); ++ni) {
    const UcpCell cell = mc_ucp_cell(
        chain, x, t_max, mus[ni], mu, nests, epsilon, n_paths,
        derive_stream(seed, {static_cast<std::uint64_t>(ni)}));
    probs.push_back(cell.prob);

    const std::string tag = "n=" + std::to_string(ni + 1);
    double margin = 0.0;
    bool pass = true;
    if (ni > 0) {
      const double band =
          3.0 * std::hypot(cell.prob.std_error, probs[ni - 1].std_error);
      margin = probs[ni - 1].mean + band - cell.prob.mean;
      pass = margin >= 0.0;
    }
    report.rows.push_back(VerifyRow{"prob " + tag, nan_v, cell.prob.mean,
                                    cell.prob.std_error, nan_v, nan_v, margin,
                                    pass});

    for (std::size_t k = 0; k < nests.size(); ++k) {
      const std::string ktag = tag + " k=" + std::to_string(k + 1);
      report.rows.push_back(VerifyRow{"exit " + ktag, nan_v,
                                      cell.exit_prob[k].mean,
                                      cell.exit_prob[k].std_error, nan_v,
                                      nan_v, 0.0, true});
      report.rows.push_back(VerifyRow{"trunc " + ktag, nan_v,
                                      cell.trunc_moment[k].mean,
                                      cell.trunc_moment[k].std_error, nan_v,
                                      nan_v, 0.0, true});
      // Chebyshev-style decomposition; holds pathwise on shared paths.
      const double rhs =
          cell.exit_prob[k].mean + cell.trunc_moment[k].mean;
      const double dmargin = rhs + 1e-12 - cell.prob.mean;
      report.rows.push_back(VerifyRow{"decomp " + ktag, nan_v, cell.prob.mean,
                                      nan_v, rhs, nan_v, dmargin,
                                      dmargin >= 0.0});
    }
    if (last_is_full) {
      const double exit_full = cell.exit_prob.back().mean;
      report.rows.push_back(VerifyRow{"exit-fullspace " + tag, 0.0, exit_full,
                                      0.0, nan_v, nan_v, -exit_full,
                                      exit_full == 0.0});
    }
  }

  {
    const double last = probs.back().mean;
    const double margin = options.prob_tolerance - last;
    report.rows.push_back(VerifyRow{"prob-final<=" +
                                        short_num(options.prob_tolerance),
                                    nan_v, last, probs.back().std_error,
                                    options.prob_tolerance, nan_v, margin,
                                    margin >= 0.0});
  }
  report.notes.push_back(
      "decomposition rows: P(sup > eps) <= P(tau_{V_k} <= T) + eps^{-2} "
      "E[sup |A_n^{V_k} - A^{V_k}|^2], shared paths");
  finalize(report);
  return report;
}

}  // namespace revuz
