#include "bpgof/errors.hpp"

namespace bpgof {

const char* to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::EstimateOutsideTheta: return "EstimateOutsideTheta";
    case ErrorKind::NoDoubleZeros: return "NoDoubleZeros";
    case ErrorKind::EvenPointsUndefined: return "EvenPointsUndefined";
    case ErrorKind::ConditionalEvenPointsUndefined: return "ConditionalEvenPointsUndefined";
    case ErrorKind::NoInteriorRoot: return "NoInteriorRoot";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::PerfectCorrelation: return "PerfectCorrelation";
    case ErrorKind::EstimatorFailedOnOriginal: return "EstimatorFailedOnOriginal";
    case ErrorKind::DegenerateSample: return "DegenerateSample";
    }
    return "Unknown";
}

} // namespace bpgof
