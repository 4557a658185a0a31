#pragma once

#include <stdexcept>
#include <string>

namespace splitann {

enum class ErrorCode {
    DiagonalPoint,
    OutOfChart,
    NonFiniteDensity,
    NotCyclic,
    NotC1,
    IncompatibleMetrics,
    NonFiniteIntegrand,
    SingularDual,
    DegenerateIstar,
    NotUnitNormal,
    NotTangent,
    StepTooSmall,
    ChartBreakdown,
    NotHolonomicBoundary,
    NonCompactDifference,
    CoincidentPoints,
    NonPositiveB,
    NonSmoothB,
    DegeneratePairing,
    NotC3,
    NotC3AtPoint,
    SClassFail,
    InvalidArgument,
    ConfigError,
};

const char* to_string(ErrorCode code);

// Numerical failures map to CLI exit code 3; configuration problems to 2.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace splitann
