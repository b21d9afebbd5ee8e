#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "revuz/chain.hpp"
#include "revuz/measure.hpp"
#include "revuz/path.hpp"
#include "revuz/pcaf.hpp"
#include "revuz/types.hpp"

namespace revuz {

struct MCEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample stdev / sqrt(count)
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

// Deterministic Monte Carlo driver: replica i draws from an independent
// stream derive_stream(seed, {i}) and writes `width` outputs. Replicas are
// embarrassingly parallel; the reduction is sequential in replica order, so
// results are bit-identical regardless of worker count.
std::vector<MCEstimate> mc_run_multi(
    std::uint64_t seed, std::size_t count, std::size_t width,
    const std::function<void(std::uint64_t, double*)>& replica);

MCEstimate mc_run(std::uint64_t seed, std::size_t count,
                  const std::function<double(std::uint64_t)>& replica);

// E_x[int_0^inf e^{-alpha t} g(X_t) dA_t] with A the PCAF of mu. The
// discount is realized as an independent Exp(alpha) clock T: the replica
// value is int_0^{T ^ zeta} g(X_s) f(X_s) ds, which is unbiased (no horizon
// truncation) and keeps genuine variance even when the discounted integrand
// is deterministic. Exact reference: sum_y r_alpha(x,y) g(y) mu(y).
MCEstimate mc_revuz_functional(const Chain& chain, Index x, double alpha,
                               const Vector& g, const MeasureVec& mu,
                               std::size_t count, std::uint64_t seed);

// E_x[A_inf B_inf] on a strictly sub-Markov chain (paths die almost surely).
MCEstimate mc_product_infinity(const Chain& chain, Index x,
                               const MeasureVec& mu, const MeasureVec& nu,
                               std::size_t count, std::uint64_t seed);

// E_x[sup_{t<=T} |A_t - B_t|^2] with both PCAFs coupled along the same path.
MCEstimate mc_sup_diff_moment(const Chain& chain, Index x, double t_max,
                              const MeasureVec& mu, const MeasureVec& nu,
                              std::size_t count, std::uint64_t seed);

// Same coupled moment evaluated at several horizons from one path batch
// (horizon = max of t_grid); estimates are monotone in T pathwise.
std::vector<MCEstimate> mc_sup_diff_moment_multi(
    const Chain& chain, Index x, const std::vector<double>& t_grid,
    const MeasureVec& mu, const MeasureVec& nu, std::size_t count,
    std::uint64_t seed);

// P_x(tau_{V_k} <= T) for every nest from one shared path batch, so the
// estimates are nonincreasing in k exactly, not just statistically.
std::vector<MCEstimate> mc_exit_profile(
    const Chain& chain, Index x, const std::vector<std::vector<Index>>& nests,
    double t_max, std::size_t count, std::uint64_t seed);

// One batch of coupled paths evaluated for everything the ucp suite needs:
// the deviation probability, and per nest the exit probability and the
// truncated second moment. Sharing paths makes the Chebyshev-style
// decomposition P(sup > eps) <= P(tau <= T) + moment/eps^2 hold pathwise.
struct UcpCell {
  MCEstimate prob;                       // P_x(sup_{t<=T} |A_n - A| > eps)
  std::vector<MCEstimate> exit_prob;     // per nest
  std::vector<MCEstimate> trunc_moment;  // per nest, already divided by eps^2
};

UcpCell mc_ucp_cell(const Chain& chain, Index x, double t_max,
                    const MeasureVec& mu_n, const MeasureVec& mu,
                    const std::vector<std::vector<Index>>& nests,
                    double epsilon, std::size_t count, std::uint64_t seed);

// I(lambda, kappa, T) = int_0^T e^{-lambda s} int_0^{T-s} e^{-kappa u} du ds
// in closed form with analytic lambda = 0 / kappa = 0 limits. Exposed so the
// closed form can be validated against a quadrature oracle.
double exp_time_integral(double lambda, double kappa, double t_max);

// E_x[A_T^2] = 2 sum_{k,l} phi_k(x) M_{k,l} a_l I(lambda_k, lambda_l, T)
// with M = Phi^T diag(mu) Phi and a = Phi^T mu.
double exact_second_moment(const Chain& chain, Index x, double t_max,
                           const MeasureVec& mu);

}  // namespace revuz
