#include "revuz/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <thread>

#include "revuz/kernels.hpp"

namespace revuz {

namespace {

MCEstimate reduce(const std::vector<double>& values, std::uint64_t seed) {
  MCEstimate est;
  est.count = values.size();
  est.seed = seed;
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      const double d = v - est.mean;
      ss += d * d;
    }
    const double var = ss / static_cast<double>(values.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(values.size()));
  }
  return est;
}

}  // namespace

std::vector<MCEstimate> mc_run_multi(
    std::uint64_t seed, std::size_t count, std::size_t width,
    const std::function<void(std::uint64_t, double*)>& replica) {
  if (count == 0) throw BadParameter("estimator needs count >= 1");
  if (width == 0) throw BadParameter("estimator needs width >= 1");
  std::vector<std::vector<double>> cols(width, std::vector<double>(count));

  const auto run_range = [&](std::size_t lo, std::size_t hi) {
    std::vector<double> row(width);
    for (std::size_t i = lo; i < hi; ++i) {
      replica(derive_stream(seed, {static_cast<std::uint64_t>(i)}),
              row.data());
      for (std::size_t j = 0; j < width; ++j) cols[j][i] = row[j];
    }
  };

  const std::size_t hw = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::thread::hardware_concurrency()));
  const std::size_t workers = std::min(hw, count / 4096);
  if (workers <= 1) {
    run_range(0, count);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  std::vector<MCEstimate> out;
  out.reserve(width);
  for (std::size_t j = 0; j < width; ++j) out.push_back(reduce(cols[j], seed));
  return out;
}

MCEstimate mc_run(std::uint64_t seed, std::size_t count,
                  const std::function<double(std::uint64_t)>& replica) {
  return mc_run_multi(seed, count, 1,
                      [&](std::uint64_t s, double* out) { *out = replica(s); })
      .front();
}

MCEstimate mc_revuz_functional(const Chain& chain, Index x, double alpha,
                               const Vector& g, const MeasureVec& mu,
                               std::size_t count, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw NegativeAlpha("mc_revuz_functional needs alpha > 0");
  if (g.size() != chain.size()) throw BadParameter("test function size mismatch");
  const Vector f = density(chain, mu);

  const Vector gf = (g.array() * f.array()).matrix();
  const auto replica = [&](std::uint64_t s) {
    const double clock = Rng(derive_stream(s, {0})).exponential(alpha);
    const PathRecord p = sample_path(chain, x, clock, derive_stream(s, {1}));
    double acc = 0.0;
    double prev = 0.0;
    Index cur = p.start;
    for (std::size_t i = 0; i < p.jump_times.size(); ++i) {
      acc += gf(cur) * (p.jump_times[i] - prev);
      prev = p.jump_times[i];
      cur = p.states[i];
    }
    const double end = p.end_time();
    if (end > prev) acc += gf(cur) * (end - prev);
    return acc;
  };
  return mc_run(seed, count, replica);
}

MCEstimate mc_product_infinity(const Chain& chain, Index x,
                               const MeasureVec& mu, const MeasureVec& nu,
                               std::size_t count, std::uint64_t seed) {
  if (!chain.strictly_sub_markov()) {
    throw ConservativeChain(
        "E_x[A_inf B_inf] needs strictly positive killing");
  }
  const Vector f_mu = density(chain, mu);
  const Vector f_nu = density(chain, nu);
  const double inf = std::numeric_limits<double>::infinity();
  const auto replica = [&](std::uint64_t s) {
    const PathRecord p = sample_path(chain, x, inf, s);
    double a = 0.0;
    double b = 0.0;
    double prev = 0.0;
    Index cur = p.start;
    for (std::size_t i = 0; i < p.jump_times.size(); ++i) {
      const double dt = p.jump_times[i] - prev;
      a += f_mu(cur) * dt;
      b += f_nu(cur) * dt;
      prev = p.jump_times[i];
      cur = p.states[i];
    }
    const double end = p.end_time();
    if (end > prev) {
      a += f_mu(cur) * (end - prev);
      b += f_nu(cur) * (end - prev);
    }
    return a * b;
  };
  return mc_run(seed, count, replica);
}

MCEstimate mc_sup_diff_moment(const Chain& chain, Index x, double t_max,
                              const MeasureVec& mu, const MeasureVec& nu,
                              std::size_t count, std::uint64_t seed) {
  return mc_sup_diff_moment_multi(chain, x, {t_max}, mu, nu, count, seed)
      .front();
}

std::vector<MCEstimate> mc_sup_diff_moment_multi(
    const Chain& chain, Index x, const std::vector<double>& t_grid,
    const MeasureVec& mu, const MeasureVec& nu, std::size_t count,
    std::uint64_t seed) {
  if (t_grid.empty()) throw BadParameter("empty horizon grid");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw NonpositiveTime("sup-diff moment needs T > 0");
  }
  const double horizon = *std::max_element(t_grid.begin(), t_grid.end());
  const Vector f_mu = density(chain, mu);
  const Vector f_nu = density(chain, nu);
  const auto replica = [&](std::uint64_t s, double* out) {
    const PathRecord p = sample_path(chain, x, horizon, s);
    const PCAFSeries a = pcaf_along(p, f_mu);
    const PCAFSeries b = pcaf_along(p, f_nu);
    for (std::size_t j = 0; j < t_grid.size(); ++j) {
      const double d = sup_diff(a, b, t_grid[j]);
      out[j] = d * d;
    }
  };
  return mc_run_multi(seed, count, t_grid.size(), replica);
}

std::vector<MCEstimate> mc_exit_profile(
    const Chain& chain, Index x, const std::vector<std::vector<Index>>& nests,
    double t_max, std::size_t count, std::uint64_t seed) {
  if (nests.empty()) throw BadParameter("exit profile needs nests");
  if (!(t_max > 0.0)) throw NonpositiveTime("exit profile needs T > 0");
  std::vector<std::vector<bool>> masks;
  masks.reserve(nests.size());
  for (const auto& nest : nests) masks.push_back(subset_mask(chain, nest));
  const auto replica = [&](std::uint64_t s, double* out) {
    const PathRecord p = sample_path(chain, x, t_max, s);
    for (std::size_t k = 0; k < masks.size(); ++k) {
      out[k] = exit_time(p, masks[k]) <= t_max ? 1.0 : 0.0;
    }
  };
  return mc_run_multi(seed, count, masks.size(), replica);
}

UcpCell mc_ucp_cell(const Chain& chain, Index x, double t_max,
                    const MeasureVec& mu_n, const MeasureVec& mu,
                    const std::vector<std::vector<Index>>& nests,
                    double epsilon, std::size_t count, std::uint64_t seed) {
  if (!(t_max > 0.0)) throw NonpositiveTime("ucp cell needs T > 0");
  if (!(epsilon > 0.0)) throw BadParameter("ucp cell needs epsilon > 0");
  const Vector f_n = density(chain, mu_n);
  const Vector f = density(chain, mu);
  std::vector<std::vector<bool>> masks;
  masks.reserve(nests.size());
  for (const auto& nest : nests) masks.push_back(subset_mask(chain, nest));

  const std::size_t k_count = masks.size();
  const std::size_t width = 1 + 2 * k_count;
  const double inv_eps2 = 1.0 / (epsilon * epsilon);
  const auto replica = [&](std::uint64_t s, double* out) {
    const PathRecord p = sample_path(chain, x, t_max, s);
    const PCAFSeries a = pcaf_along(p, f_n);
    const PCAFSeries b = pcaf_along(p, f);
    out[0] = sup_diff(a, b, t_max) > epsilon ? 1.0 : 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      out[1 + k] = exit_time(p, masks[k]) <= t_max ? 1.0 : 0.0;
      const PCAFSeries ak = pcaf_restricted(p, f_n, masks[k]);
      const PCAFSeries bk = pcaf_restricted(p, f, masks[k]);
      const double d = sup_diff(ak, bk, t_max);
      out[1 + k_count + k] = d * d * inv_eps2;
    }
  };
  std::vector<MCEstimate> parts = mc_run_multi(seed, count, width, replica);

  UcpCell cell;
  cell.prob = parts[0];
  cell.exit_prob.assign(parts.begin() + 1,
                        parts.begin() + 1 + static_cast<std::ptrdiff_t>(k_count));
  cell.trunc_moment.assign(
      parts.begin() + 1 + static_cast<std::ptrdiff_t>(k_count), parts.end());
  return cell;
}

double exp_time_integral(double lambda, double kappa, double t_max) {
  if (!(t_max > 0.0)) throw NonpositiveTime("time integral needs T > 0");
  // The integration domain is the triangle {s, u >= 0, s + u <= T}, so the
  // integral is symmetric in (lambda, kappa). Three regimes keep every
  // branch free of cancellation and overflow, including the near-zero and
  // near-equal rates an eigensolver produces.
  const double a = std::max(lambda, kappa);
  const double b = std::min(lambda, kappa);
  const auto j = [t_max](double theta) {
    return theta == 0.0 ? t_max : -std::expm1(-theta * t_max) / theta;
  };

  if (std::abs(a) * t_max <= 0.5 && std::abs(b) * t_max <= 0.5) {
    // I = T^2 sum_{i,j} (-aT)^i (-bT)^j / (i+j+2)!; factorial decay, no
    // two large terms cancel
    const double at = -a * t_max;
    const double bt = -b * t_max;
    std::array<double, 21> inv_fact;
    inv_fact[0] = 1.0;
    for (std::size_t k = 1; k < inv_fact.size(); ++k) {
      inv_fact[k] = inv_fact[k - 1] / static_cast<double>(k);
    }
    double sum = 0.0;
    double ai = 1.0;
    for (int i = 0; i <= 18; ++i) {
      double bj = 1.0;
      for (int jj = 0; i + jj <= 18; ++jj) {
        sum += ai * bj * inv_fact[static_cast<std::size_t>(i + jj + 2)];
        bj *= bt;
      }
      ai *= at;
    }
    return t_max * t_max * sum;
  }
  if ((a - b) * t_max <= 0.1) {
    // close rates, at least one sizable, so b is bounded away from 0
    return (j(a) - std::exp(-b * t_max) * j(a - b)) / b;
  }
  // well-separated rates: divided difference of j, both values bounded by T
  return (j(b) - j(a)) / (a - b);
}

double exact_second_moment(const Chain& chain, Index x, double t_max,
                           const MeasureVec& mu) {
  if (!(t_max > 0.0)) throw NonpositiveTime("second moment needs T > 0");
  if (x < 0 || x >= chain.size()) throw InvalidSubset("state out of range");
  if (mu.weights.size() != chain.size()) {
    throw BadParameter("measure size does not match chain");
  }
  const SpectralData<double>& sp = chain.spectral();
  const Index n = chain.size();
  const Vector a = sp.basis.transpose() * mu.weights;
  const Matrix m_mu =
      sp.basis.transpose() * mu.weights.asDiagonal() * sp.basis;
  Matrix integrals(n, n);
  for (Index k = 0; k < n; ++k) {
    for (Index l = 0; l < n; ++l) {
      integrals(k, l) =
          exp_time_integral(sp.eigenvalues(k), sp.eigenvalues(l), t_max);
    }
  }
  const Vector folded = m_mu.cwiseProduct(integrals) * a;
  return 2.0 * sp.basis.row(x).dot(folded);
}

}  // namespace revuz
