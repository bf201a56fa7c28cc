#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace obed {

// Shared tolerances.
inline constexpr double kProbTol = 1e-12;     // probability-vector validation
inline constexpr double kSupportTol = 1e-12;  // support detection on policy mass
inline constexpr double kFeasTol = 1e-9;      // obedience feasibility checks
inline constexpr double kLpFeasTol = 1e-8;    // LP primal feasibility
inline constexpr double kLpOptTol = 1e-9;     // LP reduced-cost optimality
inline constexpr double kActiveTol = 1e-7;    // active-set slack threshold

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedNorm : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingNashProfile : std::runtime_error {
    std::size_t state;
    explicit MissingNashProfile(std::size_t omega)
        : std::runtime_error("no profile matches the Nash flow of state " +
                             std::to_string(omega)),
          state(omega) {}
};

struct EmptySupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NondifferentiablePoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotOptimal : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace obed
