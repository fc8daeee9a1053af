#pragma once

#include <stdexcept>
#include <string>

namespace entq {

// Bad arguments: dimension mismatches, out-of-range parameters, empty input.
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical failure: non-convergence, tolerance violation, divergent training.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file: bad header, wrong version, truncated or corrupt data.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Metric mathematically undefined on the given inputs (e.g. zero variance).
struct UndefinedMetricError : std::runtime_error {
    explicit UndefinedMetricError(const std::string& msg) : std::runtime_error(msg) {}
};

// A generator could not reach its target (bin starvation, bisection failure).
struct SamplingError : std::runtime_error {
    explicit SamplingError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace entq
