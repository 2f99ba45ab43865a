#pragma once

#include <stdexcept>
#include <string>

namespace ltr {

// Base of every error raised by the library. Subclasses name the failure
// condition so callers (and tests) can catch precisely what they expect.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LTR_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                    \
   public:                                                       \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// geometry
LTR_DEFINE_ERROR(InvalidArgument);
LTR_DEFINE_ERROR(InvalidPose);
LTR_DEFINE_ERROR(InvalidPrimitive);
LTR_DEFINE_ERROR(PointBehindCamera);
LTR_DEFINE_ERROR(PoleSingularity);
LTR_DEFINE_ERROR(EmptyNeighborhood);

// pointcloud
LTR_DEFINE_ERROR(MissingPose);
LTR_DEFINE_ERROR(DegenerateNeighborhood);

// dynamic detection
LTR_DEFINE_ERROR(MissingNormals);

// trajectory
LTR_DEFINE_ERROR(DuplicateTimestamp);
LTR_DEFINE_ERROR(NoPointsInPrimitive);
LTR_DEFINE_ERROR(EmptyScan);

// crf
LTR_DEFINE_ERROR(NoPrimitives);
LTR_DEFINE_ERROR(NonFiniteUnary);

// learning
LTR_DEFINE_ERROR(NonFiniteGradient);

// metrics
LTR_DEFINE_ERROR(ShapeMismatch);
LTR_DEFINE_ERROR(DegenerateConfiguration);
LTR_DEFINE_ERROR(LengthMismatch);
LTR_DEFINE_ERROR(EmptyPrediction);

// io
LTR_DEFINE_ERROR(IoError);
LTR_DEFINE_ERROR(FormatError);

// pipeline
LTR_DEFINE_ERROR(ConfigError);
LTR_DEFINE_ERROR(FrameFailure);

#undef LTR_DEFINE_ERROR

}  // namespace ltr
