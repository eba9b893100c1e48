#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bzreg {

enum class ErrorCode {
  kInvalidConfig,
  kInvalidInformSet,
  kCommonQuorumTooSmall,
  kEqualStampsDifferentValue,
  kLengthMismatch,
  kAccessViolation,
  kUnknownProcess,
  kConcurrentFinalSets,
  kInvariantBroken,
  kNoLinearization,
  kBoundTooLarge,
  kScenarioConfig,
  kSuspectedProcess,
  kStepLimitExhausted,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the campaign runner in particular) can map it to a verdict.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bzreg
