#pragma once

#include <stdexcept>
#include <string>

namespace hyperc {

/// Invalid or inconsistent configuration / arguments.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A synthesis step found the requested attenuation level unattainable.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical kernel failed to converge or produced an unusable result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hyperc
