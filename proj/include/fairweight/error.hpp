#pragma once

#include <stdexcept>
#include <string>

namespace fairweight {

enum class Errc {
    // configuration
    InvalidConfig,
    InvalidSchema,
    // data ingestion and partitioning
    IoError,
    MissingColumn,
    NonBinaryTarget,
    MissingValue,
    DegenerateSplit,
    TooFewRows,
    SeedMismatch,
    TooFewBlocks,
    // metric preconditions
    LengthMismatch,
    EmptyInput,
    SingleClass,
    NoPositives,
    // model and weighting preconditions
    SlotMismatch,
    DegenerateLabels,
    NegativeWeight,
    AllZeroWeights,
    ShapeMismatch,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

// Process exit codes: 0 success, 2 config error, 3 data error, 4 runtime failure.
inline int exit_code_for(Errc code) {
    switch (code) {
        case Errc::InvalidConfig:
        case Errc::InvalidSchema:
            return 2;
        case Errc::IoError:
        case Errc::MissingColumn:
        case Errc::NonBinaryTarget:
        case Errc::MissingValue:
        case Errc::DegenerateSplit:
        case Errc::TooFewRows:
        case Errc::SeedMismatch:
        case Errc::TooFewBlocks:
            return 3;
        default:
            return 4;
    }
}

[[noreturn]] inline void raise(Errc code, const std::string& msg) {
    throw Error(code, msg);
}

} // namespace fairweight
