#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace echosite {

/// Malformed input file. `offset` is a 1-based line number for text formats
/// and a byte offset for binary ones.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a computation does not hold (near-field
/// evaluation, coincident points, ...).
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A region of interest selected no facets.
class NoCoverageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A metric is undefined for the given data (zero-energy trace).
class UndefinedMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace echosite
