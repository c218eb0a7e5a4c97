#pragma once

#include <stdexcept>
#include <string>

namespace camp {

/// Raised when an iterative numeric procedure detects instability,
/// divergence, or non-convergence; the message carries the diagnostics.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace camp
