#pragma once

#include <stdexcept>
#include <string>

namespace uavris {

// Iteration cap hit before the requested tolerance was reached.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A scenario field (or field combination) violates its documented range.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Inputs are individually valid but the model degenerates (e.g. a
// moment-matching denominator hits zero).
struct ModelError : std::runtime_error {
    explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

// Configured payload/speed combination exceeds what the airframe can lift.
struct UnflyableError : std::runtime_error {
    explicit UnflyableError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace uavris
