#ifndef STAGESIM_ERRORS_HPP
#define STAGESIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stagesim {

// Error codes shared with the C API (see stagesim_c.h).
enum class ErrorCode : int {
  Ok = 0,
  VerificationFailure = 1,
  ConfigError = 2,
  PrefixConflict = 10,
  CapacityExceeded = 11,
  NonMonotoneTarget = 12,
  NotPrefixFreeLimit = 13,
  QTooSmall = 14,
  NoExponent = 15,
  MonotonicityBreak = 16,
  ConeNotEmpty = 17,
  TargetOutOfRange = 18,
  NonMonotoneOuter = 19,
  HorizonExceeded = 20,
  InvalidArgument = 21,
  IoError = 22,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

#define STAGESIM_DEFINE_ERROR(NAME)                        \
  class NAME##Error : public Error {                       \
   public:                                                 \
    explicit NAME##Error(const std::string& what)          \
        : Error(ErrorCode::NAME, #NAME ": " + what) {}     \
  }

STAGESIM_DEFINE_ERROR(PrefixConflict);
STAGESIM_DEFINE_ERROR(CapacityExceeded);
STAGESIM_DEFINE_ERROR(NonMonotoneTarget);
STAGESIM_DEFINE_ERROR(NotPrefixFreeLimit);
STAGESIM_DEFINE_ERROR(QTooSmall);
STAGESIM_DEFINE_ERROR(NoExponent);
STAGESIM_DEFINE_ERROR(MonotonicityBreak);
STAGESIM_DEFINE_ERROR(ConeNotEmpty);
STAGESIM_DEFINE_ERROR(TargetOutOfRange);
STAGESIM_DEFINE_ERROR(NonMonotoneOuter);
STAGESIM_DEFINE_ERROR(HorizonExceeded);
STAGESIM_DEFINE_ERROR(InvalidArgument);
STAGESIM_DEFINE_ERROR(ConfigError);
STAGESIM_DEFINE_ERROR(IoError);

#undef STAGESIM_DEFINE_ERROR

}  // namespace stagesim

#endif  // STAGESIM_ERRORS_HPP
