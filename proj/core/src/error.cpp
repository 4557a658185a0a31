#include "splitann/error.hpp"

namespace splitann {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DiagonalPoint: return "DiagonalPoint";
        case ErrorCode::OutOfChart: return "OutOfChart";
        case ErrorCode::NonFiniteDensity: return "NonFiniteDensity";
        case ErrorCode::NotCyclic: return "NotCyclic";
        case ErrorCode::NotC1: return "NotC1";
        case ErrorCode::IncompatibleMetrics: return "IncompatibleMetrics";
        case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
        case ErrorCode::SingularDual: return "SingularDual";
        case ErrorCode::DegenerateIstar: return "DegenerateIstar";
        case ErrorCode::NotUnitNormal: return "NotUnitNormal";
        case ErrorCode::NotTangent: return "NotTangent";
        case ErrorCode::StepTooSmall: return "StepTooSmall";
        case ErrorCode::ChartBreakdown: return "ChartBreakdown";
        case ErrorCode::NotHolonomicBoundary: return "NotHolonomicBoundary";
        case ErrorCode::NonCompactDifference: return "NonCompactDifference";
        case ErrorCode::CoincidentPoints: return "CoincidentPoints";
        case ErrorCode::NonPositiveB: return "NonPositiveB";
        case ErrorCode::NonSmoothB: return "NonSmoothB";
        case ErrorCode::DegeneratePairing: return "DegeneratePairing";
        case ErrorCode::NotC3: return "NotC3";
        case ErrorCode::NotC3AtPoint: return "NotC3AtPoint";
        case ErrorCode::SClassFail: return "SClassFail";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

bool is_config_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::NotC1:
        case ErrorCode::NotCyclic:
        case ErrorCode::IncompatibleMetrics:
            return true;
        default:
            return false;
    }
}

}  // namespace splitann
