#include "leafcausal/error.hpp"

namespace leafcausal {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::PointOutsideChart: return "PointOutsideChart";
    case ErrorCode::NonFiniteCoefficient: return "NonFiniteCoefficient";
    case ErrorCode::BasePointMismatch: return "BasePointMismatch";
    case ErrorCode::InvalidCurve: return "InvalidCurve";
    case ErrorCode::InvalidAtlas: return "InvalidAtlas";
    case ErrorCode::IndexMismatch: return "IndexMismatch";
    case ErrorCode::NotSameLeaf: return "NotSameLeaf";
    case ErrorCode::ChartChainNotFound: return "ChartChainNotFound";
    case ErrorCode::NotAnIsometry: return "NotAnIsometry";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::ZeroWarping: return "ZeroWarping";
    case ErrorCode::NoTimelikeDirections: return "NoTimelikeDirections";
    case ErrorCode::LeftAtlas: return "LeftAtlas";
    case ErrorCode::StepUnderflow: return "StepUnderflow";
    case ErrorCode::NotNormal: return "NotNormal";
    case ErrorCode::NotTimelike: return "NotTimelike";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ResolutionTooCoarse: return "ResolutionTooCoarse";
    case ErrorCode::GraphHasCycle: return "GraphHasCycle";
    case ErrorCode::UnknownExample: return "UnknownExample";
    case ErrorCode::AuditFailed: return "AuditFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownKey: return "UnknownKey";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace leafcausal
