#pragma once

#include <stdexcept>
#include <string>

namespace bpgof {

enum class ErrorKind {
    EstimateOutsideTheta,
    NoDoubleZeros,
    EvenPointsUndefined,
    ConditionalEvenPointsUndefined,
    NoInteriorRoot,
    MaxIterations,
    NonConvergence,
    DegenerateDenominator,
    PerfectCorrelation,
    EstimatorFailedOnOriginal,
    DegenerateSample,
};

const char* to_string(ErrorKind kind) noexcept;

// Statistical precondition failures. Invalid arguments use std::invalid_argument.
class StatError : public std::runtime_error {
public:
    StatError(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace bpgof
