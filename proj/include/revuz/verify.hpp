#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "revuz/assumptions.hpp"
#include "revuz/chain.hpp"
#include "revuz/estimators.hpp"
#include "revuz/measure.hpp"
#include "revuz/types.hpp"

namespace revuz {

// One verification case. Fields not applicable to a row are NaN. The row
// passes iff margin >= 0; how the margin is built depends on the row kind:
// residual rows use tolerance - residual, equality rows 3*stderr - |diff|,
// inequality rows bound - (estimate - 3*stderr).
struct VerifyRow {
  std::string label;
  double exact;
  double estimate;
  double std_error;
  double bound;
  double ratio;  // tightness LHS/RHS where meaningful
  double margin;
  bool pass;
};

struct VerifyReport {
  std::string suite;
  std::string scenario;
  std::uint64_t seed = 0;
  double tolerance = 0.0;
  std::vector<std::string> notes;
  std::vector<VerifyRow> rows;
  bool pass = true;
};

struct KernelCheckOptions {
  double tolerance = 1e-10;
  // Part-process subset for the domination rows; empty = middle half.
  std::vector<Index> part_subset;
  // Test hook: adds `fault` to one entry of the first heat kernel so the
  // suite demonstrably fails with named identities.
  bool has_fault = false;
  double fault = 0.0;
};

// Residual checks of the exact kernel engine: symmetry, Chapman-Kolmogorov,
// resolvent identity, sub-stochasticity (conservation when applicable),
// off-diagonal bound, on-diagonal monotonicity, resolvent mass bound 1/beta,
// and part-kernel domination.
VerifyReport verify_kernel_identities(const Chain& chain,
                                      const std::vector<double>& t_grid,
                                      const std::vector<double>& alpha_grid,
                                      const KernelCheckOptions& options = {},
                                      const std::string& scenario = "");

struct RevuzCase {
  std::string label;
  Index x = 0;
  double alpha = 1.0;
  Vector g;
  MeasureVec mu;
};

// MC estimate of E_x[int e^{-alpha t} g(X_t) dA_t] against the exact
// r_alpha-integral for every case; two-sided 3-sigma acceptance.
VerifyReport verify_revuz(const Chain& chain,
                          const std::vector<RevuzCase>& cases,
                          std::size_t n_paths, std::uint64_t seed,
                          const std::string& scenario = "");

// Default case grid over the supplied named measures: both endpoints and the
// middle state, alpha in {0.5, 1, 2}, g in {1, indicator of the center}.
std::vector<RevuzCase> make_revuz_cases(
    const Chain& chain,
    const std::vector<std::pair<std::string, MeasureVec>>& measures);

struct KacCase {
  std::string label;
  Index x = 0;
  MeasureVec mu;
  MeasureVec nu;
};

// MC E_x[A_inf B_inf] against the exact two-term 0-resolvent formula on a
// strictly sub-Markov chain.
VerifyReport verify_kac(const Chain& chain, const std::vector<KacCase>& cases,
                        std::size_t n_paths, std::uint64_t seed,
                        const std::string& scenario = "");

// Exact right-hand side of the key sup-difference inequality:
// 18 (||U_a mu|| + ||U_a nu||) ||U_a mu - U_a nu||
//   + 4 e^{2T} (1 - e^{-aT}) (||U_1 mu||^2 + ||U_1 nu||^2).
double supdiff_bound_rhs(const Chain& chain, const MeasureVec& mu,
                         const MeasureVec& nu, double alpha, double t_max);

// Coupled MC moment E_x[sup_{t<=T}|A_t - B_t|^2] per starting state against
// the exact bound on the full (alpha, T) grid. The left side does not depend
// on alpha, so each (T, x) moment is estimated once and compared against
// every alpha's bound.
VerifyReport verify_supdiff_bound(const Chain& chain, const MeasureVec& mu,
                                  const MeasureVec& nu,
                                  const std::vector<double>& alpha_grid,
                                  const std::vector<double>& t_grid,
                                  const std::vector<Index>& x_set,
                                  std::size_t n_paths, std::uint64_t seed,
                                  const std::string& scenario = "");

// Logarithmic alpha grid 2^{-6}..2^{4} used to optimize the bound.
std::vector<double> default_bound_alpha_grid();

struct MomentConvergenceOptions {
  double final_fraction = 0.1;  // final moment <= fraction * first moment
  std::vector<double> bound_alpha_grid;  // empty = default_bound_alpha_grid()
};

// Max-over-x MC moment sequence for mu_n -> mu, with the alpha-optimized
// exact bound per n. Passes iff the moment rows are nonincreasing within
// 3-sigma bands, the final moment is below final_fraction of the first, and
// the bound column is nonincreasing in exact arithmetic.
VerifyReport verify_moment_convergence(
    const Chain& chain, const std::vector<MeasureVec>& mus,
    const MeasureVec& mu, double t_max, const std::vector<Index>& x_set,
    std::size_t n_paths, std::uint64_t seed, const std::string& scenario = "",
    const MomentConvergenceOptions& options = {});

struct UcpOptions {
  double prob_tolerance = 0.05;  // final P(sup > eps) must be below this
};

// Deviation probabilities P_x(sup_{t<=T}|A_n - A| > eps) per n on a
// conservative chain, with the exit/truncation decomposition per nest from
// the same coupled path batches.
VerifyReport verify_ucp_convergence(
    const Chain& chain, const std::vector<MeasureVec>& mus,
    const MeasureVec& mu, const std::vector<std::vector<Index>>& nests,
    double t_max, double epsilon, Index x, std::size_t n_paths,
    std::uint64_t seed, const std::string& scenario = "",
    const UcpOptions& options = {});

}  // namespace revuz
