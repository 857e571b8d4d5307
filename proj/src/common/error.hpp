#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mempal {

// Every failure the core can report. The C API exposes these 1:1 as
// mempal_status values, so append only.
enum class ErrorCode {
  InvalidArgument = 1,
  EmptyText,
  ProviderUnavailable,
  MalformedProviderOutput,
  NoTranscriptAttached,
  NoLabels,
  LabelsOutOfOrder,
  EmptySegments,
  DimMismatch,
  EmptyMap,
  SinkUnavailable,
  TooManyFrames,
  OutOfOrderTimestamp,
  ZeroVector,
  NoPriorTurn,
  ZeroDenominator,
  NoData,
  ScenarioInvalid,
  NotCalibrated,
  CalibrationInProgress,
  NoSighting,
  ImageNotRetained,
  BadTimeRange,
  Io,
  NotFound,
  Unauthorized,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace mempal
