#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tssid {

enum class ErrorCode {
    // flightdata
    MissingChannel,
    NonNumericCell,
    LengthMismatch,
    ZeroVariance,
    DegenerateChannel,
    UnknownChannel,
    OverlappingIds,
    TargetExcluded,
    InvalidRecord,
    // synthgen
    InvalidFrequencyBand,
    UnstableParameters,
    InvalidProfile,
    // sindy
    DegreeTooHigh,
    SeriesTooShort,
    RankDeficient,
    NoActiveTerms,
    MissingInitialDerivative,
    NoSegments,
    // neural
    DimensionMismatch,
    ShapeMismatch,
    EmptyDataset,
    EmptyGrid,
    // eval
    EmptySeries,
    NonPositiveFlightMean,
    MissingPrediction,
    FlightSetMismatch,
    // pipeline
    ConfigError,
    IoError,
    ModelMismatch,
    MissingModel,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so the
/// CLI can map it onto a stable exit status.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace tssid
