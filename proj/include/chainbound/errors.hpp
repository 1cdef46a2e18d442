#pragma once

#include <stdexcept>
#include <string>

namespace chainbound {

// Input fails a structural check (stochasticity, reversibility, ...).
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input is structurally fine but outside the mathematical domain of an
// operation (no spectral gap, mu + eps >= 1, ...).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chainbound
