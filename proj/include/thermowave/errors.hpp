#pragma once

#include <stdexcept>

namespace thermowave {

/// A numerical stage failed (non-convergence, singular system). Distinct from
/// std::invalid_argument, which signals bad parameters or configuration.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thermowave

namespace thermowave {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace thermowave
