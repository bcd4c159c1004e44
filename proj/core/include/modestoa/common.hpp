#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace modestoa {

// Mode S physical layer timing.
inline constexpr double kChipPeriod = 0.5e-6;
inline constexpr double kSymbolPeriod = 1.0e-6;
inline constexpr double kPreambleDuration = 8.0e-6;
inline constexpr int kPreambleChips = 16;

inline constexpr double kDefaultSampleRate = 2.4e6;

/// Thrown when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when input data (files, streams) is malformed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modestoa
