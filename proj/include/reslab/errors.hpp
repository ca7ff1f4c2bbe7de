#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

/// Bad dimensions, incompatible settings, out-of-range indices.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A trajectory or tangent vector left the representable range.
struct divergence_error : std::runtime_error {
    long step;
    divergence_error(const std::string& what, long step_index)
        : std::runtime_error(what + " (step " + std::to_string(step_index) + ")"),
          step(step_index) {}
};

/// Normal equations are singular and no ridge term was supplied.
struct singularity_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A series carries no usable signal (e.g. zero variance everywhere).
struct degenerate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace reslab
