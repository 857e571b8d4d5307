#include "common/error.hpp"

namespace mempal {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::MalformedProviderOutput: return "MalformedProviderOutput";
    case ErrorCode::NoTranscriptAttached: return "NoTranscriptAttached";
    case ErrorCode::NoLabels: return "NoLabels";
    case ErrorCode::LabelsOutOfOrder: return "LabelsOutOfOrder";
    case ErrorCode::EmptySegments: return "EmptySegments";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptyMap: return "EmptyMap";
    case ErrorCode::SinkUnavailable: return "SinkUnavailable";
    case ErrorCode::TooManyFrames: return "TooManyFrames";
    case ErrorCode::OutOfOrderTimestamp: return "OutOfOrderTimestamp";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::NoPriorTurn: return "NoPriorTurn";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NoData: return "NoData";
    case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorCode::NotCalibrated: return "NotCalibrated";
    case ErrorCode::CalibrationInProgress: return "CalibrationInProgress";
    case ErrorCode::NoSighting: return "NoSighting";
    case ErrorCode::ImageNotRetained: return "ImageNotRetained";
    case ErrorCode::BadTimeRange: return "BadTimeRange";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::Unauthorized: return "Unauthorized";
  }
  return "Unknown";
}

}  // namespace mempal
