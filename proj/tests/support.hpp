#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "revuz/chain.hpp"
#include "revuz/kernels.hpp"
#include "revuz/measure.hpp"
#include "revuz/rng.hpp"

namespace testsupport {

using revuz::Chain;
using revuz::Index;
using revuz::Matrix;
using revuz::MeasureVec;
using revuz::Vector;

struct Quadrature {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre rule via Newton iteration on the Legendre recurrence.
inline Quadrature gauss_legendre(int n) {
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[static_cast<std::size_t>(i)] = -x;
    q.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.weights[static_cast<std::size_t>(i)] = w;
    q.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  return q;
}

inline double integrate_panel(const std::function<double(double)>& f,
                              double a, double b, const Quadrature& q) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    acc += q.weights[i] * f(mid + half * q.nodes[i]);
  }
  return acc * half;
}

// int_0^T f, with panels geometrically graded toward 0 so exponential
// boundary layers of any stiffness are resolved.
inline double integrate_graded(const std::function<double(double)>& f,
                               double t_max, const Quadrature& q,
                               int panels = 40) {
  if (t_max == 0.0) return 0.0;
  double acc = 0.0;
  double hi = t_max;
  for (int k = 0; k + 1 < panels; ++k) {
    const double lo = hi * 0.5;
    acc += integrate_panel(f, lo, hi, q);
    hi = lo;
  }
  acc += integrate_panel(f, 0.0, hi, q);
  return acc;
}

// int_0^T f with panels graded toward both endpoints; the integrand may
// have boundary layers at either end.
inline double integrate_graded_both(const std::function<double(double)>& f,
                                    double t_max, const Quadrature& q,
                                    int panels = 40) {
  const double half = 0.5 * t_max;
  const double lower = integrate_graded(f, half, q, panels);
  const double upper = integrate_graded(
      [&](double s) { return f(t_max - s); }, half, q, panels);
  return lower + upper;
}

// Quadrature oracle for the closed-form exp_time_integral:
// I(lambda, kappa, T) = int_0^T e^{-lambda s} (int_0^{T-s} e^{-kappa u} du) ds
// with both time integrals done numerically. The e^{-lambda s} layer sits at
// s = 0 and the inner integral's layer at s = T, so the outer rule grades
// toward both ends.
inline double exp_time_integral_oracle(double lambda, double kappa,
                                       double t_max, const Quadrature& q) {
  const auto inner = [&](double s) {
    return integrate_graded(
        [&](double u) { return std::exp(-kappa * u); }, t_max - s, q);
  };
  return integrate_graded_both(
      [&](double s) { return std::exp(-lambda * s) * inner(s); }, t_max, q);
}

// Semigroup quadrature oracle for E_x[A_T^2]:
// 2 int_0^T [P_s (f . int_0^{T-s} P_v f dv)](x) ds with f = dmu/dm.
inline double second_moment_oracle(const Chain& chain, Index x, double t_max,
                                   const MeasureVec& mu, const Quadrature& q) {
  const Vector f = revuz::density(chain, mu);
  const auto outer = [&](double s) {
    Vector h = Vector::Zero(chain.size());
    // accumulate the inner vector integral component-wise
    const double u_max = t_max - s;
    if (u_max > 0.0) {
      double hi = u_max;
      for (int k = 0; k < 40; ++k) {
        const double lo = k + 1 < 40 ? hi * 0.5 : 0.0;
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        for (std::size_t i = 0; i < q.nodes.size(); ++i) {
          const double v = mid + half * q.nodes[i];
          h += (q.weights[i] * half) * revuz::apply_semigroup(chain, v, f);
        }
        hi = lo;
      }
    }
    const Vector inner = (f.array() * h.array()).matrix();
    return revuz::apply_semigroup(chain, s, inner)(x);
  };
  // The saturating modes of the inner integral put a second boundary layer
  // at s = T (width 1/rate, like the one at s = 0), so grade both ends.
  return 2.0 * integrate_graded_both(outer, t_max, q);
}

// Dense-LU route to U_alpha(mu), independent of the spectral engine:
// solve (alpha I - Q) v = mu ./ m.
inline Vector lu_potential(const Chain& chain, double alpha,
                           const MeasureVec& mu) {
  Matrix a = -chain.generator();
  a.diagonal().array() += alpha;
  const Vector rhs = (mu.weights.array() / chain.m().array()).matrix();
  return a.partialPivLu().solve(rhs);
}

// Random m-symmetric chain built from symmetric conductances on a ring
// backbone plus random chords; optional independent killing per state.
inline Chain random_chain(std::uint64_t seed, Index min_n, Index max_n,
                          bool with_killing) {
  revuz::Rng rng(revuz::derive_stream(seed, {0xC4A17ull}));
  const Index span = max_n - min_n + 1;
  const Index n =
      min_n + static_cast<Index>(rng.uniform() * static_cast<double>(span));
  Vector m(n);
  for (Index i = 0; i < n; ++i) m(i) = 0.2 + 1.8 * rng.uniform();

  Matrix c = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const Index j = (i + 1) % n;
    if (i == j) continue;
    const double w = 0.1 + rng.uniform();
    c(i, j) = w;
    c(j, i) = w;
  }
  for (Index e = 0; e < n; ++e) {
    const Index i = static_cast<Index>(rng.uniform() * static_cast<double>(n));
    const Index j = static_cast<Index>(rng.uniform() * static_cast<double>(n));
    if (i == j) continue;
    const double w = 0.5 * rng.uniform();
    c(i, j) += w;
    c(j, i) += w;
  }

  Matrix q(n, n);
  Vector kill = Vector::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (with_killing) kill(i) = 0.3 + rng.uniform();
    for (Index j = 0; j < n; ++j) q(i, j) = i == j ? 0.0 : c(i, j) / m(i);
    q(i, i) = -q.row(i).sum() - kill(i);
  }

  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  return Chain(std::move(labels), std::move(m), std::move(q));
}

// Random measure supported on at most max_support states.
inline MeasureVec random_sparse_measure(const Chain& chain, revuz::Rng& rng,
                                        Index max_support) {
  const Index n = chain.size();
  Vector w = Vector::Zero(n);
  const Index k =
      1 + static_cast<Index>(rng.uniform() * static_cast<double>(max_support));
  for (Index pick = 0; pick < k; ++pick) {
    const Index site =
        static_cast<Index>(rng.uniform() * static_cast<double>(n));
    w(site) = 0.1 + rng.uniform();
  }
  return revuz::make_measure(chain, std::move(w));
}

}  // namespace testsupport
