#pragma once

#include <stdexcept>
#include <string>

namespace splinelab {

// Values mirror the SPLINELAB_* status codes of the C API.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kOutOfDomain = 2,
  kDuplicateKnots = 3,
  kTooFewPoints = 4,
  kSingularSystem = 5,
  kIo = 6,
  kConfig = 7,
  kInternal = 99,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace splinelab
