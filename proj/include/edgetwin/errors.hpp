#pragma once

#include <stdexcept>
#include <string>

namespace edgetwin {

// Error taxonomy. The CLI maps these to exit codes:
//   ConfigError -> 2, DataError -> 3, NumericError -> 4.

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Bad input data (trajectory files, checkpoints with wrong shapes, ...).
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Nonfinite values where the math requires finite ones.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// API misuse (step() before reset(), mismatched dimensions, ...).
struct LifecycleError : std::logic_error {
    explicit LifecycleError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace edgetwin
