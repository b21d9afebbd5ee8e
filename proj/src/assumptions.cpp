#include "revuz/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

namespace revuz {

namespace {

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Max of |U_1 mu_n - U_1 mu| over supp(mu_n) union supp(mu).
double ess_gap(const Chain& chain, const MeasureVec& mu_n,
               const MeasureVec& mu) {
  return potential_gap(chain, 1.0, mu_n, mu).ess_sup_norm;
}

// Nonincreasing-within-slack plus final <= tolerance; marks offending rows.
bool apply_gap_rule(std::vector<TrendRow>& rows, std::size_t first,
                    double tolerance) {
  bool ok = true;
  double scale = 1.0;
  for (std::size_t i = first; i < rows.size(); ++i) {
    scale = std::max(scale, rows[i].value);
  }
  const double slack = 1e-12 * scale;
  for (std::size_t i = first + 1; i < rows.size(); ++i) {
    if (rows[i].value > rows[i - 1].value + slack) {
      rows[i].ok = false;
      ok = false;
    }
  }
  if (!rows.empty() && rows.back().value > tolerance) {
    rows.back().ok = false;
    ok = false;
  }
  return ok;
}

// Decay rule for the short-time columns: nonincreasing as delta shrinks and
// the smallest-delta value <= 0.1 * the largest-delta value (or the largest
// is 0). Rows are expected in descending delta order.
bool apply_decay_rule(std::vector<TrendRow>& rows, std::size_t first) {
  bool ok = true;
  if (first >= rows.size()) return ok;
  double scale = 1.0;
  for (std::size_t i = first; i < rows.size(); ++i) {
    scale = std::max(scale, rows[i].value);
  }
  const double slack = 1e-12 * scale;
  for (std::size_t i = first + 1; i < rows.size(); ++i) {
    if (rows[i].value > rows[i - 1].value + slack) {
      rows[i].ok = false;
      ok = false;
    }
  }
  const double head = rows[first].value;
  const double tail = rows.back().value;
  if (head > 0.0 && tail > 0.1 * head) {
    rows.back().ok = false;
    ok = false;
  }
  return ok;
}

std::vector<double> sorted_descending(std::vector<double> deltas) {
  for (double d : deltas) {
    if (!(d > 0.0)) throw NonpositiveTime("delta grid must be positive");
  }
  std::sort(deltas.begin(), deltas.end(), std::greater<double>());
  return deltas;
}

double total_variation(const MeasureVec& a, const MeasureVec& b) {
  return (a.weights - b.weights).cwiseAbs().sum();
}

std::vector<Index> full_space(const Chain& chain) {
  std::vector<Index> all(static_cast<std::size_t>(chain.size()));
  for (Index i = 0; i < chain.size(); ++i) {
    all[static_cast<std::size_t>(i)] = i;
  }
  return all;
}

}  // namespace

void validate_nests(const Chain& chain,
                    const std::vector<std::vector<Index>>& nests) {
  if (nests.empty()) throw BadParameter("nest sequence is empty");
  std::vector<bool> prev(static_cast<std::size_t>(chain.size()), false);
  std::vector<bool> seen(static_cast<std::size_t>(chain.size()), false);
  bool first = true;
  for (const auto& nest : nests) {
    std::vector<bool> cur(static_cast<std::size_t>(chain.size()), false);
    for (Index x : canonical_subset(chain, nest)) {
      cur[static_cast<std::size_t>(x)] = true;
      seen[static_cast<std::size_t>(x)] = true;
    }
    if (!first) {
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (prev[i] && !cur[i]) {
          throw NestNotIncreasing("nest sequence is not increasing at " +
                                  chain.label(static_cast<Index>(i)));
        }
      }
    }
    prev = cur;
    first = false;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw NestUnionIncomplete("nests never cover " +
                                chain.label(static_cast<Index>(i)));
    }
  }
}

TrendReport check_assumption_strong(const Chain& chain,
                                    const std::vector<MeasureVec>& mus,
                                    const MeasureVec& mu, double tolerance) {
  if (mus.empty()) throw BadParameter("measure sequence is empty");
  TrendReport report;
  report.name = "assumption-strong";
  double max_bound = potential(chain, 1.0, mu).values.maxCoeff();
  for (std::size_t n = 0; n < mus.size(); ++n) {
    report.rows.push_back({"gap n=" + std::to_string(n + 1),
                           ess_gap(chain, mus[n], mu), true});
    max_bound = std::max(
        max_bound, potential(chain, 1.0, mus[n]).values.maxCoeff());
  }
  report.satisfied = apply_gap_rule(report.rows, 0, tolerance);
  report.notes.push_back(
      "gap = ||U_1 mu_n - U_1 mu|| in L^inf(mu_n + mu); rule: nonincreasing "
      "and final <= " +
      short_num(tolerance));
  report.notes.push_back(
      "finite measures have bounded 1-potentials; max ||U_1 .||_inf = " +
      short_num(max_bound));
  return report;
}

TrendReport check_assumption_general(
    const Chain& chain, const std::vector<MeasureVec>& mus,
    const MeasureVec& mu, const std::vector<std::vector<Index>>& nests,
    double tolerance) {
  if (mus.empty()) throw BadParameter("measure sequence is empty");
  validate_nests(chain, nests);
  TrendReport report;
  report.name = "assumption-general";
  for (std::size_t k = 0; k < nests.size(); ++k) {
    const MeasureVec mu_k = restrict_measure(mu, nests[k]);
    const std::size_t first = report.rows.size();
    for (std::size_t n = 0; n < mus.size(); ++n) {
      const MeasureVec mun_k = restrict_measure(mus[n], nests[k]);
      report.rows.push_back({"gap k=" + std::to_string(k + 1) +
                                 " n=" + std::to_string(n + 1),
                             ess_gap(chain, mun_k, mu_k), true});
    }
    if (!apply_gap_rule(report.rows, first, tolerance)) {
      report.satisfied = false;
    }
  }
  report.notes.push_back(
      "per nest V_k: gap = ||U_1 mu_n^{V_k} - U_1 mu^{V_k}|| in L^inf; rule "
      "as in the strong check, tolerance " +
      short_num(tolerance));
  return report;
}

TrendReport check_conditions_A(const Chain& chain,
                               const std::vector<MeasureVec>& mus,
                               const MeasureVec& mu,
                               const std::vector<Index>& k0,
                               const std::vector<double>& deltas,
                               double tolerance) {
  if (mus.empty()) throw BadParameter("measure sequence is empty");
  if (deltas.empty()) throw BadParameter("delta grid is empty");
  TrendReport report;
  report.name = "conditions-A";
  report.notes.push_back(
      "A1 (joint continuity of the kernel) holds automatically on a finite "
      "space");

  std::size_t first = report.rows.size();
  for (std::size_t n = 0; n < mus.size(); ++n) {
    report.rows.push_back({"A2 tv n=" + std::to_string(n + 1),
                           total_variation(mus[n], mu), true});
  }
  if (!apply_gap_rule(report.rows, first, tolerance)) report.satisfied = false;
  report.notes.push_back(
      "A2: weak convergence checked as total-variation decay (equivalent on "
      "a finite space)");

  std::vector<bool> in_k0(static_cast<std::size_t>(chain.size()), false);
  for (Index x : canonical_subset(chain, k0)) {
    in_k0[static_cast<std::size_t>(x)] = true;
  }
  const auto support_ok = [&](const MeasureVec& m, const std::string& who) {
    for (Index x : support(m)) {
      if (!in_k0[static_cast<std::size_t>(x)]) {
        report.rows.push_back({"A3 " + who + " escapes at " + chain.label(x),
                               m.weights(x), false});
        report.satisfied = false;
        return;
      }
    }
  };
  support_ok(mu, "mu");
  for (std::size_t n = 0; n < mus.size(); ++n) {
    support_ok(mus[n], "mu_" + std::to_string(n + 1));
  }
  report.notes.push_back("A3: supp(mu_n) and supp(mu) contained in K0, exact");

  first = report.rows.size();
  const std::vector<Index> all = full_space(chain);
  for (double delta : sorted_descending(deltas)) {
    double worst = short_time_energy(chain, mu, all, delta);
    for (const auto& mu_n : mus) {
      worst = std::max(worst, short_time_energy(chain, mu_n, all, delta));
    }
    report.rows.push_back({"A4 delta=" + short_num(delta), worst, true});
  }
  if (!apply_decay_rule(report.rows, first)) report.satisfied = false;
  report.notes.push_back(
      "A4: sup over the family (and mu) of the short-time energy on the full "
      "space; rule: nonincreasing in delta and value(delta_min) <= 0.1 * "
      "value(delta_max)");
  return report;
}

TrendReport check_conditions_B(const Chain& chain,
                               const std::vector<MeasureVec>& mus,
                               const MeasureVec& mu,
                               const std::vector<double>& deltas,
                               const std::vector<std::vector<Index>>& nests,
                               double tolerance) {
  if (mus.empty()) throw BadParameter("measure sequence is empty");
  if (deltas.empty()) throw BadParameter("delta grid is empty");
  TrendReport report;
  report.name = "conditions-B";
  report.notes.push_back(
      "B1 (joint continuity of the kernel) holds automatically on a finite "
      "space");

  std::size_t first = report.rows.size();
  for (std::size_t n = 0; n < mus.size(); ++n) {
    report.rows.push_back({"B2 tv n=" + std::to_string(n + 1),
                           total_variation(mus[n], mu), true});
  }
  if (!apply_gap_rule(report.rows, first, tolerance)) report.satisfied = false;
  report.notes.push_back(
      "B2: vague convergence checked as total-variation decay (equivalent on "
      "a finite space)");

  std::vector<std::vector<Index>> compacts = nests;
  if (compacts.empty()) {
    compacts.push_back(full_space(chain));
    report.notes.push_back("no nests supplied; B3 uses the full space");
  }
  for (std::size_t k = 0; k < compacts.size(); ++k) {
    first = report.rows.size();
    for (double delta : sorted_descending(deltas)) {
      double worst = short_time_energy(chain, mu, compacts[k], delta);
      for (const auto& mu_n : mus) {
        worst = std::max(worst,
                         short_time_energy(chain, mu_n, compacts[k], delta));
      }
      report.rows.push_back({"B3 k=" + std::to_string(k + 1) +
                                 " delta=" + short_num(delta),
                             worst, true});
    }
    if (!apply_decay_rule(report.rows, first)) report.satisfied = false;
  }
  report.notes.push_back(
      "B3: short-time energy restricted to each nest; decay rule as in A4");
  return report;
}

}  // namespace revuz
