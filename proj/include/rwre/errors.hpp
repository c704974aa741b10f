#pragma once

#include <stdexcept>
#include <string>

namespace rwre {

// Site lookup outside the generated window.
struct window_error : std::out_of_range {
    explicit window_error(const std::string& what) : std::out_of_range(what) {}
};

// Sum requested over an empty index range (i > j).
struct empty_range_error : std::invalid_argument {
    explicit empty_range_error(const std::string& what) : std::invalid_argument(what) {}
};

// E[rho^s] = 1 has no positive root (walk drifts too hard, or is recurrent).
struct no_kappa_error : std::runtime_error {
    explicit no_kappa_error(const std::string& what) : std::runtime_error(what) {}
};

// A truncated limit (W tail, ladder scan, conditional acceptance) could not be
// resolved within the available window or attempt budget.
struct insufficient_window_error : std::runtime_error {
    explicit insufficient_window_error(const std::string& what) : std::runtime_error(what) {}
};

// Rejection or path-length budget exhausted before the event of interest.
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid or out-of-domain argument (weights, exponents, truncation levels).
struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace rwre
