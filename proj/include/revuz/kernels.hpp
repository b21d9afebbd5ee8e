#pragma once

#include <cmath>

#include "revuz/chain.hpp"
#include "revuz/types.hpp"

namespace revuz {

enum class KernelKind { Heat, Resolvent };

// Kernel values are densities with respect to m in the second argument:
// p_t(x,y) or r_alpha(x,y), NOT raw probabilities. The probability of being
// at y is p_t(x,y) * m(y).
template <typename Scalar>
struct KernelMatrix {
  KernelKind kind;
  Scalar parameter;  // t for Heat, alpha for Resolvent
  DenseMatrix<Scalar> values;
};

using Kernel = KernelMatrix<double>;

namespace detail {

// Spectral round-off can push kernel entries a hair below zero. Entries in
// [-1e-10, 0) are clamped to 0; anything more negative is structural and
// raises NumericalBreakdown.
template <typename Scalar>
void clamp_kernel_entries(DenseMatrix<Scalar>& values) {
  const Scalar floor = Scalar(-1e-10);
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      if (values(i, j) < Scalar(0)) {
        if (values(i, j) < floor) {
          throw NumericalBreakdown(
              "kernel entry below the -1e-10 clamp threshold");
        }
        values(i, j) = Scalar(0);
      }
    }
  }
}

}  // namespace detail

// p_t(x,y) = sum_k e^{-lambda_k t} phi_k(x) phi_k(y).
template <typename Scalar>
KernelMatrix<Scalar> heat_kernel(const ChainT<Scalar>& chain, Scalar t) {
  if (!(t > Scalar(0))) throw NonpositiveTime("heat_kernel needs t > 0");
  const SpectralData<Scalar>& sp = chain.spectral();
  const DenseVector<Scalar> weights = (-t * sp.eigenvalues.array()).exp();
  DenseMatrix<Scalar> values =
      sp.basis * weights.asDiagonal() * sp.basis.transpose();
  detail::clamp_kernel_entries(values);
  return KernelMatrix<Scalar>{KernelKind::Heat, t, std::move(values)};
}

// r_alpha(x,y) = sum_k phi_k(x) phi_k(y) / (alpha + lambda_k)
//             = ((alpha I - Q)^{-1})(x,y) / m(y).
// alpha = 0 is admitted only on strictly sub-Markov chains; on a
// conservative chain the 0-potential diverges.
template <typename Scalar>
KernelMatrix<Scalar> resolvent_kernel(const ChainT<Scalar>& chain,
                                      Scalar alpha) {
  if (alpha < Scalar(0)) throw NegativeAlpha("resolvent needs alpha >= 0");
  if (alpha == Scalar(0) && !chain.strictly_sub_markov()) {
    throw ZeroAlphaOnConservativeChain(
        "0-potential diverges without strictly positive killing");
  }
  const SpectralData<Scalar>& sp = chain.spectral();
  const DenseVector<Scalar> weights =
      (alpha + sp.eigenvalues.array()).inverse();
  DenseMatrix<Scalar> values =
      sp.basis * weights.asDiagonal() * sp.basis.transpose();
  detail::clamp_kernel_entries(values);
  return KernelMatrix<Scalar>{KernelKind::Resolvent, alpha, std::move(values)};
}

// (P_t f)(x) = sum_y p_t(x,y) f(y) m(y), evaluated spectrally in O(n^2).
template <typename Scalar>
DenseVector<Scalar> apply_semigroup(const ChainT<Scalar>& chain, Scalar t,
                                    const DenseVector<Scalar>& f) {
  if (t < Scalar(0)) throw NonpositiveTime("apply_semigroup needs t >= 0");
  if (f.size() != chain.size()) {
    throw BadParameter("apply_semigroup: function size mismatch");
  }
  const SpectralData<Scalar>& sp = chain.spectral();
  const DenseVector<Scalar> coeffs =
      sp.basis.transpose() * (chain.m().array() * f.array()).matrix();
  const DenseVector<Scalar> damped =
      ((-t * sp.eigenvalues.array()).exp() * coeffs.array()).matrix();
  return sp.basis * damped;
}

// (R_alpha f)(x) = sum_y r_alpha(x,y) f(y) m(y).
template <typename Scalar>
DenseVector<Scalar> apply_resolvent(const ChainT<Scalar>& chain, Scalar alpha,
                                    const DenseVector<Scalar>& f) {
  if (f.size() != chain.size()) {
    throw BadParameter("apply_resolvent: function size mismatch");
  }
  if (alpha < Scalar(0)) throw NegativeAlpha("resolvent needs alpha >= 0");
  if (alpha == Scalar(0) && !chain.strictly_sub_markov()) {
    throw ZeroAlphaOnConservativeChain(
        "0-potential diverges without strictly positive killing");
  }
  const SpectralData<Scalar>& sp = chain.spectral();
  const DenseVector<Scalar> coeffs =
      sp.basis.transpose() * (chain.m().array() * f.array()).matrix();
  const DenseVector<Scalar> damped =
      (coeffs.array() / (alpha + sp.eigenvalues.array())).matrix();
  return sp.basis * damped;
}

}  // namespace revuz
