#pragma once

#include <stdexcept>
#include <string>

namespace lrfcal {

/// Base class for every error raised by the library.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define LRFCAL_DEFINE_ERROR(Name)              \
  class Name : public CalibrationError {       \
   public:                                     \
    using CalibrationError::CalibrationError;  \
  };

LRFCAL_DEFINE_ERROR(OutOfDomain)
LRFCAL_DEFINE_ERROR(DegenerateProfile)
LRFCAL_DEFINE_ERROR(RankDeficient)
LRFCAL_DEFINE_ERROR(MaskConflict)
LRFCAL_DEFINE_ERROR(NonFiniteResidual)
LRFCAL_DEFINE_ERROR(SingularNormalEquations)
LRFCAL_DEFINE_ERROR(IkNoConvergence)
LRFCAL_DEFINE_ERROR(PoseSamplingExhausted)
LRFCAL_DEFINE_ERROR(OrientationViolation)
LRFCAL_DEFINE_ERROR(EmptyInput)
LRFCAL_DEFINE_ERROR(InvalidInput)

#undef LRFCAL_DEFINE_ERROR

}  // namespace lrfcal
