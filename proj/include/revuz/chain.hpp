#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "revuz/types.hpp"

namespace revuz {

// Eigendecomposition of the m-symmetrized generator. `eigenvalues` holds the
// spectrum of -D^{1/2} Q D^{-1/2} in ascending order (all >= 0 for a valid
// sub-Markov generator); column k of `basis` is phi_k = D^{-1/2} psi_k, an
// orthonormal basis of L^2(m).
template <typename Scalar>
struct SpectralData {
  DenseVector<Scalar> eigenvalues;
  DenseMatrix<Scalar> basis;
};

// Finite weighted state space with an m-symmetric sub-Markov rate generator.
// Immutable after construction; all member accessors are const and the type
// is safe to share across threads.
template <typename Scalar>
class ChainT {
 public:
  ChainT(std::vector<std::string> labels, DenseVector<Scalar> m,
         DenseMatrix<Scalar> q)
      : labels_(std::move(labels)), m_(std::move(m)), q_(std::move(q)) {
    validate_and_decompose();
  }

  Index size() const { return m_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Index x) const {
    return labels_[static_cast<std::size_t>(x)];
  }

  Index index_of(std::string_view name) const {
    for (Index i = 0; i < size(); ++i) {
      if (labels_[static_cast<std::size_t>(i)] == name) return i;
    }
    throw UnknownLabel("unknown state label: " + std::string(name));
  }

  const DenseVector<Scalar>& m() const { return m_; }
  const DenseMatrix<Scalar>& generator() const { return q_; }

  // Row deficit of Q: the rate of the independent killing clock per state.
  // Deficits within 1e-12 * max(1, max|Q|) of zero are snapped to exact zero
  // so `conservative()` is a crisp predicate.
  const DenseVector<Scalar>& killing() const { return killing_; }

  bool conservative() const { return conservative_; }

  const SpectralData<Scalar>& spectral() const { return spectral_; }

  // Smallest eigenvalue of the symmetrized -Q (exactly 0 for conservative
  // chains after snapping).
  Scalar spectral_bottom() const { return spectral_.eigenvalues(0); }

  // True when all eigenvalues are strictly positive, i.e. the lifetime is
  // almost surely finite from every state and 0-potentials exist.
  bool strictly_sub_markov() const { return spectral_bottom() > Scalar(0); }

 private:
  ChainT() = default;

  void validate_and_decompose() {
    const Index n = m_.size();
    if (n < 1) throw BadParameter("chain needs at least one state");
    if (static_cast<Index>(labels_.size()) != n ||
        q_.rows() != n || q_.cols() != n) {
      throw BadParameter("chain fields have inconsistent sizes");
    }
    for (Index x = 0; x < n; ++x) {
      if (!(m_(x) > Scalar(0))) {
        throw NonpositiveWeight("weight m(" + label(x) + ") must be > 0");
      }
    }
    for (Index x = 0; x < n; ++x) {
      for (Index y = 0; y < n; ++y) {
        if (x != y && q_(x, y) < Scalar(0)) {
          throw NegativeRate("rate Q(" + label(x) + "," + label(y) +
                             ") is negative");
        }
      }
    }

    const Scalar scale =
        std::max(Scalar(1), q_.cwiseAbs().maxCoeff());
    const Scalar tol = Scalar(1e-12) * scale;

    for (Index x = 0; x < n; ++x) {
      for (Index y = x + 1; y < n; ++y) {
        const Scalar flux_xy = m_(x) * q_(x, y);
        const Scalar flux_yx = m_(y) * q_(y, x);
        const Scalar denom = std::max(
            Scalar(1), std::max(std::abs(flux_xy), std::abs(flux_yx)));
        if (std::abs(flux_xy - flux_yx) > Scalar(1e-12) * denom) {
          throw AsymmetricGenerator(
              "m-symmetry violated for pair (" + label(x) + "," + label(y) +
              "): m(x)Q(x,y)=" + std::to_string(static_cast<double>(flux_xy)) +
              " vs m(y)Q(y,x)=" + std::to_string(static_cast<double>(flux_yx)));
        }
      }
    }

    killing_.resize(n);
    for (Index x = 0; x < n; ++x) {
      Scalar deficit = -q_.row(x).sum();
      if (deficit < -tol) {
        throw NegativeKilling("row " + label(x) +
                              " of Q sums to a positive value");
      }
      if (std::abs(deficit) <= tol) deficit = Scalar(0);
      killing_(x) = deficit;
    }
    conservative_ = (killing_.maxCoeff() == Scalar(0) &&
                     killing_.minCoeff() == Scalar(0));

    // Symmetrize: A = D^{1/2} Q D^{-1/2}, then solve -A as a symmetric
    // eigenproblem. Averaging with the transpose removes the (tolerated)
    // asymmetry residual.
    DenseVector<Scalar> sqrt_m = m_.cwiseSqrt();
    DenseMatrix<Scalar> a =
        sqrt_m.asDiagonal() * q_ * sqrt_m.cwiseInverse().asDiagonal();
    DenseMatrix<Scalar> sym = Scalar(0.5) * (a + a.transpose());
    sym = -sym;

    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(sym);
    if (solver.info() != Eigen::Success) {
      throw NumericalBreakdown("eigensolver failed on symmetrized generator");
    }
    DenseVector<Scalar> evals = solver.eigenvalues();
    const Scalar ev_scale = std::max(Scalar(1), evals.cwiseAbs().maxCoeff());
    for (Index k = 0; k < n; ++k) {
      if (evals(k) < -Scalar(1e-8) * ev_scale) {
        throw NumericalBreakdown(
            "symmetrized -Q has a structurally negative eigenvalue");
      }
      if (std::abs(evals(k)) <= Scalar(1e-12) * ev_scale) evals(k) = Scalar(0);
    }
    spectral_.eigenvalues = std::move(evals);
    spectral_.basis =
        sqrt_m.cwiseInverse().asDiagonal() * solver.eigenvectors();
  }

  std::vector<std::string> labels_;
  DenseVector<Scalar> m_;
  DenseMatrix<Scalar> q_;
  DenseVector<Scalar> killing_;
  SpectralData<Scalar> spectral_;
  bool conservative_ = false;

  template <typename S>
  friend ChainT<S> kill_transform(const ChainT<S>& chain, S alpha);
};

using Chain = ChainT<double>;

// Chain with generator Q - alpha*I: the process killed at an independent
// exponential time of rate alpha. Reuses the cached eigenbasis (eigenvalues
// shift by alpha exactly), so killed-kernel identities hold to round-off of
// the original solve.
template <typename Scalar>
ChainT<Scalar> kill_transform(const ChainT<Scalar>& chain, Scalar alpha) {
  if (alpha < Scalar(0)) throw NegativeAlpha("killing rate must be >= 0");
  ChainT<Scalar> out;
  const Index n = chain.size();
  out.labels_ = chain.labels_;
  out.m_ = chain.m_;
  out.q_ = chain.q_ - alpha * DenseMatrix<Scalar>::Identity(n, n);
  out.killing_ = chain.killing_.array() + alpha;
  out.conservative_ = chain.conservative_ && alpha == Scalar(0);
  out.spectral_.eigenvalues = chain.spectral_.eigenvalues.array() + alpha;
  out.spectral_.basis = chain.spectral_.basis;
  return out;
}

// Sorted, range-checked copy of a state subset; duplicates are rejected.
template <typename Scalar>
std::vector<Index> canonical_subset(const ChainT<Scalar>& chain,
                                    std::vector<Index> subset) {
  std::sort(subset.begin(), subset.end());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 0 || subset[i] >= chain.size()) {
      throw InvalidSubset("state index out of range");
    }
    if (i > 0 && subset[i] == subset[i - 1]) {
      throw InvalidSubset("duplicate state in subset");
    }
  }
  return subset;
}

// Part process on D: the chain absorbed upon exiting D, obtained by deleting
// the rows and columns outside D. The deleted mass becomes killing.
template <typename Scalar>
ChainT<Scalar> part_chain(const ChainT<Scalar>& chain,
                          const std::vector<Index>& d) {
  if (d.empty()) throw EmptySubset("part_chain needs a nonempty subset");
  const std::vector<Index> sub = canonical_subset(chain, d);
  const Index k = static_cast<Index>(sub.size());
  std::vector<std::string> labels(sub.size());
  DenseVector<Scalar> m(k);
  DenseMatrix<Scalar> q(k, k);
  for (Index i = 0; i < k; ++i) {
    labels[static_cast<std::size_t>(i)] = chain.label(sub[i]);
    m(i) = chain.m()(sub[i]);
    for (Index j = 0; j < k; ++j) q(i, j) = chain.generator()(sub[i], sub[j]);
  }
  return ChainT<Scalar>(std::move(labels), std::move(m), std::move(q));
}

// Dirichlet form E(f,g) = -sum_x m(x) f(x) (Qg)(x); order 1 adds the L^2(m)
// inner product.
template <typename Scalar>
Scalar dirichlet_energy(const ChainT<Scalar>& chain,
                        const DenseVector<Scalar>& f,
                        const DenseVector<Scalar>& g, int order = 0) {
  if (f.size() != chain.size() || g.size() != chain.size()) {
    throw BadParameter("dirichlet_energy: function size mismatch");
  }
  if (order != 0 && order != 1) {
    throw BadParameter("dirichlet_energy: order must be 0 or 1");
  }
  const DenseVector<Scalar> qg = chain.generator() * g;
  Scalar value = -(chain.m().array() * f.array() * qg.array()).sum();
  if (order == 1) {
    value += (chain.m().array() * f.array() * g.array()).sum();
  }
  return value;
}

namespace detail {

inline std::vector<std::string> numbered_labels(Index n) {
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels.push_back("s" + std::to_string(i));
  return labels;
}

}  // namespace detail

// Cycle graph on k states with unit nearest-neighbor rates and uniform m.
inline Chain cycle(Index k) {
  if (k < 2) throw BadParameter("cycle needs k >= 2");
  Vector m = Vector::Ones(k);
  Matrix q = Matrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    const Index next = (i + 1) % k;
    const Index prev = (i + k - 1) % k;
    q(i, next) += 1.0;
    q(i, prev) += 1.0;
    q(i, i) = -q.row(i).sum();
  }
  return Chain(detail::numbered_labels(k), std::move(m), std::move(q));
}

// Path graph on k states with unit nearest-neighbor rates, reflecting ends,
// and uniform m.
inline Chain path(Index k) {
  if (k < 2) throw BadParameter("path needs k >= 2");
  Vector m = Vector::Ones(k);
  Matrix q = Matrix::Zero(k, k);
  for (Index i = 0; i + 1 < k; ++i) {
    q(i, i + 1) = 1.0;
    q(i + 1, i) = 1.0;
  }
  for (Index i = 0; i < k; ++i) q(i, i) = -q.row(i).sum();
  return Chain(detail::numbered_labels(k), std::move(m), std::move(q));
}

// Birth-death chain on {0,...,k-1}: up[i] is the rate i -> i+1, down[i] the
// rate i+1 -> i. The reference measure is recovered from detailed balance
// with m(0) = 1.
inline Chain birth_death(Index k, const std::vector<double>& up,
                         const std::vector<double>& down) {
  if (k < 2) throw BadParameter("birth_death needs k >= 2");
  if (static_cast<Index>(up.size()) != k - 1 ||
      static_cast<Index>(down.size()) != k - 1) {
    throw BadParameter("birth_death needs k-1 up rates and k-1 down rates");
  }
  for (Index i = 0; i + 1 < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    if (!(up[iu] > 0.0) || !(down[iu] > 0.0)) {
      throw BadParameter("birth_death rates must be positive");
    }
  }
  Vector m(k);
  m(0) = 1.0;
  for (Index i = 0; i + 1 < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    m(i + 1) = m(i) * up[iu] / down[iu];
  }
  Matrix q = Matrix::Zero(k, k);
  for (Index i = 0; i + 1 < k; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    q(i, i + 1) = up[iu];
    q(i + 1, i) = down[iu];
  }
  for (Index i = 0; i < k; ++i) q(i, i) = -q.row(i).sum();
  return Chain(detail::numbered_labels(k), std::move(m), std::move(q));
}

// Nearest-neighbor discretization of reflected Brownian motion on [a,b] with
// k cells: cell width h = (b-a)/k, m = h per cell, neighbor rates 1/h^2
// (k^2 on the unit interval). PCAFs of point masses approximate local times.
inline Chain reflected_bm_discretization(Index k, double a, double b) {
  if (k < 2) throw BadParameter("reflected_bm_discretization needs k >= 2");
  if (!(b > a)) throw BadParameter("interval must satisfy b > a");
  const double h = (b - a) / static_cast<double>(k);
  const double rate = 1.0 / (h * h);
  Vector m = Vector::Constant(k, h);
  Matrix q = Matrix::Zero(k, k);
  for (Index i = 0; i + 1 < k; ++i) {
    q(i, i + 1) = rate;
    q(i + 1, i) = rate;
  }
  for (Index i = 0; i < k; ++i) q(i, i) = -q.row(i).sum();
  return Chain(detail::numbered_labels(k), std::move(m), std::move(q));
}

}  // namespace revuz
