#pragma once

#include <stdexcept>

namespace fluxon {

// Solver breakdown: conditioning, lost roots, non-convergence.
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A request beyond a documented size limit.
struct cap_exceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fluxon
