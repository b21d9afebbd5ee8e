#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace revuz {

using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = DenseMatrix<double>;
using Vector = DenseVector<double>;

// Base class for every error thrown by this library. CLI maps ParseError and
// IoError to exit code 1 and all other Error subclasses to exit code 2.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define REVUZ_DEFINE_ERROR(Name) \
  struct Name : Error {          \
    using Error::Error;          \
  }

REVUZ_DEFINE_ERROR(AsymmetricGenerator);
REVUZ_DEFINE_ERROR(NonpositiveWeight);
REVUZ_DEFINE_ERROR(NegativeRate);
REVUZ_DEFINE_ERROR(NegativeKilling);
REVUZ_DEFINE_ERROR(NonpositiveTime);
REVUZ_DEFINE_ERROR(NegativeAlpha);
REVUZ_DEFINE_ERROR(ZeroAlphaOnConservativeChain);
REVUZ_DEFINE_ERROR(EmptySubset);
REVUZ_DEFINE_ERROR(InvalidSubset);
REVUZ_DEFINE_ERROR(NumericalBreakdown);
REVUZ_DEFINE_ERROR(NegativeMass);
REVUZ_DEFINE_ERROR(NegativeDensity);
REVUZ_DEFINE_ERROR(MismatchedPaths);
REVUZ_DEFINE_ERROR(TimeBeyondHorizon);
REVUZ_DEFINE_ERROR(ConservativeChain);
REVUZ_DEFINE_ERROR(NotConservative);
REVUZ_DEFINE_ERROR(NestNotIncreasing);
REVUZ_DEFINE_ERROR(NestUnionIncomplete);
REVUZ_DEFINE_ERROR(UnknownLabel);
REVUZ_DEFINE_ERROR(BadParameter);
REVUZ_DEFINE_ERROR(ParseError);
REVUZ_DEFINE_ERROR(IoError);

#undef REVUZ_DEFINE_ERROR

}  // namespace revuz
