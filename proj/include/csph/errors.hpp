#pragma once

#include <stdexcept>
#include <string>

namespace csph {

/// Shape or conformability mismatch between matrix operands.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Overflow, non-finite values, or failed convergence of an iteration.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear system with a pivot below the scale-invariant threshold.
struct SingularityError : NumericError {
    using NumericError::NumericError;
};

/// Argument outside the region where a transform/measure is defined.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Model parameters violating a structural constraint; the message lists
/// every violation with the offending index and magnitude.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// All optimizer starts failed; the message carries per-start diagnostics.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace csph
