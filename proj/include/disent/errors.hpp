#pragma once

#include <stdexcept>
#include <string>

namespace disent {

// Malformed input file (bad magic, truncated payload, ...).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated a precondition (shape mismatch, k > N, batch_size < 2, ...).
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values where finite ones are required.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested quantity has no defined value on this input
// (SNNL with no same-label peer, silhouette with a single cluster, ...).
struct UndefinedValueError : std::runtime_error {
    explicit UndefinedValueError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace disent
