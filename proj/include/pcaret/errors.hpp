#pragma once

#include <stdexcept>
#include <string>

namespace pcaret {

// Error taxonomy maps onto CLI exit codes: usage=1, data=2, provider=3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad invocation: unknown flags, contradictory options.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(what) {}
};

// Malformed or degenerate input data: unparsable rows, dimension
// mismatches, corrupt files, undefined statistics.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(what) {}
};

// Embedding provider failures: transport errors after retries, wrong
// dimensionality, exhausted rate-limit budget.
class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& what) : Error(what) {}
};

} // namespace pcaret
