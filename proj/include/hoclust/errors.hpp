#pragma once

#include <stdexcept>
#include <string>

namespace hoclust {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad sizes, incompatible dims between tensor and matrix operands.
struct shape_error : error {
    using error::error;
};

// Mode or slice index outside [0, d) / [0, n).
struct index_error : error {
    using error::error;
};

// Invalid probabilities, sparsities, or other caller-supplied parameters.
struct parameter_error : error {
    using error::error;
};

// Enumeration or iteration count would exceed the configured budget.
struct budget_error : error {
    using error::error;
};

// Structurally unusable input, e.g. an all-zero matrix fed to the SVD.
struct degenerate_error : error {
    using error::error;
};

// An input violated a documented precondition that we check (e.g. an
// asymmetric tensor passed to a symmetric-only transform).
struct contract_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

// Power method failed to reach tolerance; carries the last iterate so
// callers can inspect or salvage it.
struct convergence_error : error {
    convergence_error(const std::string& msg, std::vector<double> left,
                      std::vector<double> right, double value)
        : error(msg), last_left(std::move(left)), last_right(std::move(right)),
          last_value(value) {}
    std::vector<double> last_left;
    std::vector<double> last_right;
    double last_value;
};

}  // namespace hoclust
