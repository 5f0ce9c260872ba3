#pragma once

#include <stdexcept>
#include <string>

namespace swarmsched {

// Base class for all library errors. Every failure the library reports on
// purpose derives from this, so callers can catch one type at the boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (graph files, scenario files).
struct ParseError : Error { using Error::Error; };

// Structurally invalid data: self-loops, out-of-range vertex ids,
// kind list length mismatch, cyclic workload graphs, and similar.
struct InvariantError : Error { using Error::Error; };

// Shape mismatch between matrices / graphs / mappings.
struct DimensionError : Error { using Error::Error; };

// No injective, mask-respecting assignment exists (or an instance is
// rejected up front, e.g. more query vertices than target vertices).
struct InfeasibleError : Error { using Error::Error; };

// A row that must be normalized has no admissible support.
struct DegenerateRowError : Error { using Error::Error; };

// Fixed-point arithmetic would exceed its guaranteed-safe operand range.
struct OverflowGuardError : Error { using Error::Error; };

// An aggregate operation received an empty sequence.
struct EmptyVectorError : Error { using Error::Error; };

// Two traces / task sets that must describe the same workload do not.
struct MismatchError : Error { using Error::Error; };

// Inconsistent or out-of-range configuration values.
struct ConfigError : Error { using Error::Error; };

// Rate search could not find any feasible arrival rate at the lower probe.
struct NoFeasibleRateError : Error { using Error::Error; };

}  // namespace swarmsched
