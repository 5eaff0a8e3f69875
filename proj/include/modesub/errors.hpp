#pragma once

#include <stdexcept>
#include <string>

namespace modesub {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define MODESUB_DEFINE_ERROR(NAME)                        \
  struct NAME : Error {                                   \
    explicit NAME(const std::string& msg) : Error(msg) {} \
  }

/// The interface level function does not change sign over the interior
/// nodes, or the interface touches the domain boundary.
MODESUB_DEFINE_ERROR(InterfaceOutsideDomain);

/// A singular mode family was evaluated exactly at its center.
MODESUB_DEFINE_ERROR(EvalAtSingularCenter);

/// A mode was evaluated outside the region where it is defined
/// (e.g. a half-line power mode left of its center, or a crack mode
/// on its branch cut).
MODESUB_DEFINE_ERROR(EvalOutsideValidRegion);

/// A subtraction mode is not smooth at a point where assembly must
/// evaluate it (cross-side stencil node or source node).
MODESUB_DEFINE_ERROR(ModeNotSmoothAcrossInterface);

/// The interface fails to separate the mode-carrying region from the
/// domain boundary in a way the Dirichlet folding can absorb.
MODESUB_DEFINE_ERROR(BoundaryInsideOmega1);

/// Repeated stencil offsets make the weight system singular.
MODESUB_DEFINE_ERROR(SingularVandermonde);

/// Factorization hit a zero (or below-tolerance) pivot.
MODESUB_DEFINE_ERROR(SingularMatrix);

/// Least-squares matrix is numerically rank deficient.
MODESUB_DEFINE_ERROR(RankDeficient);

/// Vector/matrix dimensions do not line up.
MODESUB_DEFINE_ERROR(DimensionMismatch);

/// Unrecognized built-in case identifier.
MODESUB_DEFINE_ERROR(UnknownCase);

/// A rate of convergence was requested for non-positive errors.
MODESUB_DEFINE_ERROR(NonpositiveError);

/// File or stream output failed.
MODESUB_DEFINE_ERROR(IoFailure);

/// Invalid user-supplied configuration (CLI flags, config file, or
/// constructor arguments that violate a documented invariant).
MODESUB_DEFINE_ERROR(ValidationError);

#undef MODESUB_DEFINE_ERROR

}  // namespace modesub
