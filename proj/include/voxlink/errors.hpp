#pragma once

#include <stdexcept>
#include <string>

namespace voxlink {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define VOXLINK_DEFINE_ERROR(Name)                                            \
  struct Name : Error {                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {}      \
  }

// volume-core
VOXLINK_DEFINE_ERROR(UnsupportedFormat);
VOXLINK_DEFINE_ERROR(CorruptHeader);
VOXLINK_DEFINE_ERROR(DimensionMismatch);
VOXLINK_DEFINE_ERROR(IoFailure);
VOXLINK_DEFINE_ERROR(SingularTransform);
VOXLINK_DEFINE_ERROR(EmptyMask);

// synth
VOXLINK_DEFINE_ERROR(MissingMask);
VOXLINK_DEFINE_ERROR(InvalidSpec);

// harmonize
VOXLINK_DEFINE_ERROR(NoOverlap);
VOXLINK_DEFINE_ERROR(DegenerateIntensities);
VOXLINK_DEFINE_ERROR(EmptyMaskDerived);

// simmetrics
VOXLINK_DEFINE_ERROR(ShapeMismatch);
VOXLINK_DEFINE_ERROR(ZeroVector);
VOXLINK_DEFINE_ERROR(TooSmallForScales);
VOXLINK_DEFINE_ERROR(NonConvergentSqrt);
VOXLINK_DEFINE_ERROR(UnknownMeasure);

// linkage
VOXLINK_DEFINE_ERROR(Unimodal);
VOXLINK_DEFINE_ERROR(TooFewScores);
VOXLINK_DEFINE_ERROR(NonConvergence);
VOXLINK_DEFINE_ERROR(OneClassOnly);

#undef VOXLINK_DEFINE_ERROR

}  // namespace voxlink
