#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace scb {

/// Base class of everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad inputs: unreadable files, malformed CSV, invalid arguments.
struct InputError : Error {
    using Error::Error;
};

/// Algorithmic/numeric failures on otherwise well-formed inputs.
struct NumericError : Error {
    using Error::Error;
};

struct IoError : InputError {
    using InputError::InputError;
};

struct RaggedRows : InputError {
    std::size_t line;
    explicit RaggedRows(std::size_t line_)
        : InputError("csv: row at line " + std::to_string(line_) +
                     " has a different number of fields"),
          line(line_) {}
};

struct NonNumeric : InputError {
    std::size_t line;
    std::size_t field;
    NonNumeric(std::size_t line_, std::size_t field_)
        : InputError("csv: non-numeric value at line " + std::to_string(line_) +
                     ", field " + std::to_string(field_)),
          line(line_),
          field(field_) {}
};

struct ConstantFeature : NumericError {
    std::size_t column;
    explicit ConstantFeature(std::size_t column_)
        : NumericError("feature " + std::to_string(column_) +
                       " has zero variance; cannot standardize"),
          column(column_) {}
};

struct AllZeroBcss : NumericError {
    AllZeroBcss() : NumericError("all between-cluster sums of squares are zero") {}
};

struct DegenerateData : NumericError {
    DegenerateData()
        : NumericError("all observations identical under the weighted metric") {}
};

struct ClusterTooSmall : NumericError {
    ClusterTooSmall()
        : NumericError("initial partition has a cluster with fewer than 2 observations") {}
};

struct ZeroVariance : NumericError {
    std::size_t column;
    explicit ZeroVariance(std::size_t column_)
        : NumericError("bicluster has zero variance in feature " + std::to_string(column_)),
          column(column_) {}
};

struct DomainError : NumericError {
    using NumericError::NumericError;
};

}  // namespace scb
