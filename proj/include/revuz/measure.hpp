#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "revuz/chain.hpp"
#include "revuz/kernels.hpp"
#include "revuz/rng.hpp"
#include "revuz/types.hpp"

namespace revuz {

// Nonnegative measure on the state space, stored as mass per state.
template <typename Scalar>
struct MeasureVecT {
  DenseVector<Scalar> weights;

  Scalar total_mass() const { return weights.sum(); }
};

using MeasureVec = MeasureVecT<double>;

// U_alpha mu per state.
template <typename Scalar>
struct PotentialVecT {
  Scalar alpha;
  DenseVector<Scalar> values;
};

using PotentialVec = PotentialVecT<double>;

template <typename Scalar>
MeasureVecT<Scalar> make_measure(const ChainT<Scalar>& chain,
                                 DenseVector<Scalar> weights) {
  if (weights.size() != chain.size()) {
    throw BadParameter("measure size does not match chain");
  }
  for (Index x = 0; x < weights.size(); ++x) {
    if (weights(x) < Scalar(0)) {
      throw NegativeMass("measure mass at " + chain.label(x) +
                         " is negative");
    }
  }
  return MeasureVecT<Scalar>{std::move(weights)};
}

template <typename Scalar>
MeasureVecT<Scalar> zero_measure(const ChainT<Scalar>& chain) {
  return MeasureVecT<Scalar>{DenseVector<Scalar>::Zero(chain.size())};
}

template <typename Scalar>
MeasureVecT<Scalar> dirac(const ChainT<Scalar>& chain, Index x,
                          Scalar mass = Scalar(1)) {
  DenseVector<Scalar> w = DenseVector<Scalar>::Zero(chain.size());
  if (x < 0 || x >= chain.size()) throw InvalidSubset("dirac center out of range");
  if (mass < Scalar(0)) throw NegativeMass("dirac mass is negative");
  w(x) = mass;
  return MeasureVecT<Scalar>{std::move(w)};
}

// Density f = d mu / d m, f(x) = mu(x)/m(x). Well-defined since m > 0.
template <typename Scalar>
DenseVector<Scalar> density(const ChainT<Scalar>& chain,
                            const MeasureVecT<Scalar>& mu) {
  if (mu.weights.size() != chain.size()) {
    throw BadParameter("measure size does not match chain");
  }
  DenseVector<Scalar> f = mu.weights.array() / chain.m().array();
  for (Index x = 0; x < f.size(); ++x) {
    if (f(x) < Scalar(0)) {
      throw NegativeDensity("density negative at " + chain.label(x));
    }
  }
  return f;
}

// Exact support: {x : mu(x) > 0}, no thresholding.
template <typename Scalar>
std::vector<Index> support(const MeasureVecT<Scalar>& mu) {
  std::vector<Index> out;
  for (Index x = 0; x < mu.weights.size(); ++x) {
    if (mu.weights(x) > Scalar(0)) out.push_back(x);
  }
  return out;
}

// U_alpha mu(x) = sum_y r_alpha(x,y) mu(y).
template <typename Scalar>
PotentialVecT<Scalar> potential(const ChainT<Scalar>& chain, Scalar alpha,
                                const MeasureVecT<Scalar>& mu) {
  if (mu.weights.size() != chain.size()) {
    throw BadParameter("measure size does not match chain");
  }
  const KernelMatrix<Scalar> r = resolvent_kernel(chain, alpha);
  return PotentialVecT<Scalar>{alpha, r.values * mu.weights};
}

// Mass zeroed outside E.
template <typename Scalar>
MeasureVecT<Scalar> restrict_measure(const MeasureVecT<Scalar>& mu,
                                     const std::vector<Index>& e) {
  DenseVector<Scalar> w = DenseVector<Scalar>::Zero(mu.weights.size());
  for (Index x : e) {
    if (x < 0 || x >= mu.weights.size()) {
      throw InvalidSubset("restriction index out of range");
    }
    w(x) = mu.weights(x);
  }
  return MeasureVecT<Scalar>{std::move(w)};
}

template <typename Scalar>
struct PotentialGap {
  Scalar sup_norm;      // max over all states of |U_alpha mu - U_alpha nu|
  Scalar ess_sup_norm;  // max over supp(mu) union supp(nu) only
};

// The maximum principle asserts sup_norm == ess_sup_norm; both are returned
// so callers can check it.
template <typename Scalar>
PotentialGap<Scalar> potential_gap(const ChainT<Scalar>& chain, Scalar alpha,
                                   const MeasureVecT<Scalar>& mu,
                                   const MeasureVecT<Scalar>& nu) {
  if (!(alpha > Scalar(0))) throw NegativeAlpha("potential_gap needs alpha > 0");
  const DenseVector<Scalar> diff =
      (potential(chain, alpha, mu).values - potential(chain, alpha, nu).values)
          .cwiseAbs();
  Scalar ess = Scalar(0);
  for (Index x = 0; x < chain.size(); ++x) {
    if (mu.weights(x) > Scalar(0) || nu.weights(x) > Scalar(0)) {
      ess = std::max(ess, diff(x));
    }
  }
  return PotentialGap<Scalar>{diff.maxCoeff(), ess};
}

// sup_{x in K} sum_{y in K} [ int_0^delta p_s(x,y) ds ] mu(y), with the time
// integral in spectral closed form: weight (1 - e^{-lambda delta})/lambda,
// and delta for lambda = 0. Empty K yields 0 (sup over the empty set).
template <typename Scalar>
Scalar short_time_energy(const ChainT<Scalar>& chain,
                         const MeasureVecT<Scalar>& mu,
                         const std::vector<Index>& k_set, Scalar delta) {
  if (!(delta > Scalar(0))) throw NonpositiveTime("short_time_energy needs delta > 0");
  if (mu.weights.size() != chain.size()) {
    throw BadParameter("measure size does not match chain");
  }
  const std::vector<Index> k = canonical_subset(chain, k_set);
  if (k.empty()) return Scalar(0);
  const SpectralData<Scalar>& sp = chain.spectral();
  DenseVector<Scalar> w(sp.eigenvalues.size());
  for (Index i = 0; i < w.size(); ++i) {
    const Scalar lambda = sp.eigenvalues(i);
    w(i) = lambda == Scalar(0)
               ? delta
               : Scalar(-std::expm1(-double(lambda * delta))) / lambda;
  }
  DenseMatrix<Scalar> g = sp.basis * w.asDiagonal() * sp.basis.transpose();
  detail::clamp_kernel_entries(g);
  Scalar best = Scalar(0);
  for (Index x : k) {
    Scalar acc = Scalar(0);
    for (Index y : k) acc += g(x, y) * mu.weights(y);
    best = std::max(best, acc);
  }
  return best;
}

// int U_1 mu d mu = sum_x U_1 mu(x) mu(x); finite-space surrogate of the
// S_0 energy-integral condition, returned for reporting and ordering.
template <typename Scalar>
Scalar energy_integral(const ChainT<Scalar>& chain,
                       const MeasureVecT<Scalar>& mu) {
  return potential(chain, Scalar(1), mu).values.dot(mu.weights);
}

// Measure family: mass-1 uniform windows of odd width around `center`,
// clipped to the state range. Width 1 is exactly the Dirac limit.
template <typename Scalar>
std::vector<MeasureVecT<Scalar>> mollified_dirac(
    const ChainT<Scalar>& chain, Index center,
    const std::vector<Index>& widths) {
  if (center < 0 || center >= chain.size()) {
    throw InvalidSubset("mollifier center out of range");
  }
  std::vector<MeasureVecT<Scalar>> out;
  out.reserve(widths.size());
  for (Index w : widths) {
    if (w < 1 || w % 2 == 0) {
      throw BadParameter("mollifier widths must be odd and >= 1");
    }
    const Index radius = (w - 1) / 2;
    const Index lo = std::max<Index>(0, center - radius);
    const Index hi = std::min<Index>(chain.size() - 1, center + radius);
    DenseVector<Scalar> weights = DenseVector<Scalar>::Zero(chain.size());
    const Scalar mass = Scalar(1) / Scalar(hi - lo + 1);
    for (Index x = lo; x <= hi; ++x) weights(x) = mass;
    out.push_back(MeasureVecT<Scalar>{std::move(weights)});
  }
  return out;
}

template <typename Scalar>
std::vector<MeasureVecT<Scalar>> scaled(const MeasureVecT<Scalar>& mu,
                                        const std::vector<Scalar>& factors) {
  std::vector<MeasureVecT<Scalar>> out;
  out.reserve(factors.size());
  for (Scalar f : factors) {
    if (f < Scalar(0)) throw NegativeMass("scaling factor is negative");
    out.push_back(MeasureVecT<Scalar>{(f * mu.weights.array()).matrix()});
  }
  return out;
}

// Multiplicative jitter family converging to mu: member k (1-based) has
// weights mu(x) * (1 + u_{k,x}/(k+1)) with u uniform in [-1/2, 1/2] drawn
// from a stream seeded by noise_seed.
template <typename Scalar>
std::vector<MeasureVecT<Scalar>> perturbed(const MeasureVecT<Scalar>& mu,
                                           std::uint64_t noise_seed,
                                           Index count = 8) {
  if (count < 1) throw BadParameter("perturbed needs count >= 1");
  std::vector<MeasureVecT<Scalar>> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index k = 1; k <= count; ++k) {
    Rng rng(derive_stream(noise_seed, {static_cast<std::uint64_t>(k)}));
    DenseVector<Scalar> w = mu.weights;
    for (Index x = 0; x < w.size(); ++x) {
      const Scalar u = Scalar(rng.uniform()) - Scalar(0.5);
      w(x) *= Scalar(1) + u / Scalar(k + 1);
    }
    out.push_back(MeasureVecT<Scalar>{std::move(w)});
  }
  return out;
}

}  // namespace revuz
