#pragma once

#include <stdexcept>
#include <string>

namespace coracle {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CORACLE_DEFINE_ERROR(Name)                    \
  class Name : public Error {                         \
   public:                                            \
    explicit Name(const std::string& what)            \
        : Error(std::string(#Name ": ") + what) {}    \
  }

CORACLE_DEFINE_ERROR(InvalidHypothesis);
CORACLE_DEFINE_ERROR(PreconditionViolation);
CORACLE_DEFINE_ERROR(NonRealizable);
CORACLE_DEFINE_ERROR(ContradictorySample);
CORACLE_DEFINE_ERROR(EmptyClass);
CORACLE_DEFINE_ERROR(EmptyVersionSpace);
CORACLE_DEFINE_ERROR(IllegalLabel);
CORACLE_DEFINE_ERROR(SizeLimitExceeded);
CORACLE_DEFINE_ERROR(OracleFailure);
CORACLE_DEFINE_ERROR(InsufficientAgreement);
CORACLE_DEFINE_ERROR(ScheduleViolation);
CORACLE_DEFINE_ERROR(ActiveListRepetition);
CORACLE_DEFINE_ERROR(InconsistentOracleClass);
CORACLE_DEFINE_ERROR(IllegalAdversaryFunction);
CORACLE_DEFINE_ERROR(DimensionViolation);
CORACLE_DEFINE_ERROR(RoundsExhausted);
CORACLE_DEFINE_ERROR(ParseError);

#undef CORACLE_DEFINE_ERROR

}  // namespace coracle
