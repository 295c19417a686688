#pragma once

#include <stdexcept>
#include <string>

namespace bingham {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration and input problems.
struct ParseError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };
struct SampleOutOfRange : Error { using Error::Error; };

// Material-law violations detected during assembly.
struct NonPositiveViscosity : Error { using Error::Error; };
struct NegativeYield : Error { using Error::Error; };

// Linear-algebra failures.
struct SingularSystem : Error { using Error::Error; };
struct NonPositivePivot : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };

// Nonlinear solver gave up; the message carries the residual history.
struct MaxIterationsExceeded : Error { using Error::Error; };

}  // namespace bingham
