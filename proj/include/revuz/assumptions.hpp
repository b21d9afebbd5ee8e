#pragma once

#include <string>
#include <vector>

#include "revuz/chain.hpp"
#include "revuz/measure.hpp"
#include "revuz/types.hpp"

namespace revuz {

struct TrendRow {
  std::string label;
  double value = 0.0;
  bool ok = true;
};

// Evidence table for a limit statement: finitely many n cannot prove a
// limit, so each checker tabulates its sequence, applies an explicit decision
// rule (recorded in `notes`), and reports the verdict in `satisfied`.
struct TrendReport {
  std::string name;
  bool satisfied = true;
  std::vector<std::string> notes;
  std::vector<TrendRow> rows;
};

// Throws NestNotIncreasing / NestUnionIncomplete unless the nests are an
// increasing sequence of subsets whose union is the full space.
void validate_nests(const Chain& chain,
                    const std::vector<std::vector<Index>>& nests);

// Gap sequence ||U_1 mu_n - U_1 mu|| in L^inf(mu_n + mu) (the max over the
// union of supports; by the maximum principle this equals the full sup).
// Satisfied iff the sequence is nonincreasing (1e-12 relative slack) and the
// final gap is <= tolerance. Class membership (bounded 1-potential, finite
// mass) is automatic on a finite space and reported with the bound values.
TrendReport check_assumption_strong(const Chain& chain,
                                    const std::vector<MeasureVec>& mus,
                                    const MeasureVec& mu,
                                    double tolerance = 1e-6);

// Runs the strong check on the restrictions to every nest.
TrendReport check_assumption_general(
    const Chain& chain, const std::vector<MeasureVec>& mus,
    const MeasureVec& mu, const std::vector<std::vector<Index>>& nests,
    double tolerance = 1e-6);

// Sufficient-condition checker: (A1) joint continuity is automatic on a
// finite space; (A2) weak convergence as total-variation decay; (A3)
// supports contained in K0, exact; (A4) short-time energy over the full
// space tabulated on the delta grid with a decay rule.
TrendReport check_conditions_A(const Chain& chain,
                               const std::vector<MeasureVec>& mus,
                               const MeasureVec& mu,
                               const std::vector<Index>& k0,
                               const std::vector<double>& deltas,
                               double tolerance = 1e-6);

// Same with the support condition dropped and the short-time functional
// restricted to each nest; empty nests fall back to the full space.
TrendReport check_conditions_B(const Chain& chain,
                               const std::vector<MeasureVec>& mus,
                               const MeasureVec& mu,
                               const std::vector<double>& deltas,
                               const std::vector<std::vector<Index>>& nests = {},
                               double tolerance = 1e-6);

}  // namespace revuz
