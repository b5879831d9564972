#include "tssid/error.hpp"

namespace tssid {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingChannel: return "MissingChannel";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::ZeroVariance: return "ZeroVariance";
        case ErrorCode::DegenerateChannel: return "DegenerateChannel";
        case ErrorCode::UnknownChannel: return "UnknownChannel";
        case ErrorCode::OverlappingIds: return "OverlappingIds";
        case ErrorCode::TargetExcluded: return "TargetExcluded";
        case ErrorCode::InvalidRecord: return "InvalidRecord";
        case ErrorCode::InvalidFrequencyBand: return "InvalidFrequencyBand";
        case ErrorCode::UnstableParameters: return "UnstableParameters";
        case ErrorCode::InvalidProfile: return "InvalidProfile";
        case ErrorCode::DegreeTooHigh: return "DegreeTooHigh";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::NoActiveTerms: return "NoActiveTerms";
        case ErrorCode::MissingInitialDerivative: return "MissingInitialDerivative";
        case ErrorCode::NoSegments: return "NoSegments";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::EmptyDataset: return "EmptyDataset";
        case ErrorCode::EmptyGrid: return "EmptyGrid";
        case ErrorCode::EmptySeries: return "EmptySeries";
        case ErrorCode::NonPositiveFlightMean: return "NonPositiveFlightMean";
        case ErrorCode::MissingPrediction: return "MissingPrediction";
        case ErrorCode::FlightSetMismatch: return "FlightSetMismatch";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ModelMismatch: return "ModelMismatch";
        case ErrorCode::MissingModel: return "MissingModel";
    }
    return "Unknown";
}

}  // namespace tssid
