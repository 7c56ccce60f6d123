#pragma once

#include <stdexcept>
#include <string>

namespace hofer {

// Bad configuration: cover failures, malformed schedules, rejected keys.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-point solve failed to converge or the trajectory left the manifold.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A checked mathematical invariant failed.
struct InvariantViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hofer
