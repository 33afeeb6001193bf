#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace provex {

enum class ErrorCode {
  DuplicateId,
  KindMismatch,
  CycleIntroduced,
  MissingEndpoint,
  MissingSubject,
  UnknownNode,
  Validation,
  Parse,
  InvalidArgument,
  Unsolvable,
  DepthExceeded,
  UnreplayablePlan,
  UnknownSource,
  CyclicSupport,
  OverflowUnsound,
  UnknownClass,
  NotAnActivity,
  NotAGoal,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// front ends (HTTP status, CLI exit code) can map them without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace provex
