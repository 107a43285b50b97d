#pragma once

#include <stdexcept>
#include <string>

namespace ultrafsk {

// Invalid or inconsistent configuration: bad band layout, non-integral symbol
// length, malformed JSON, out-of-range parameters.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric argument outside a function's mathematical domain.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File system or format trouble (unreadable WAV, clipped write, bad path).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input recording shorter than one analysis frame.
struct TooShortError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two sequences that must agree in length do not.
struct LengthMismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Path-loss regression asked for on degenerate data (fewer than two distinct
// distances).
struct DegenerateFitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ultrafsk
