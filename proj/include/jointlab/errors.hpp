#pragma once

#include <stdexcept>
#include <string>

namespace jointlab {

// Caller supplied arguments that violate an operation's precondition.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A randomized search (projection redraws, bisection, generator redraws)
// ran out of its retry budget.
class SearchExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An internal post-condition check failed. The CLI maps this to exit code 2.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace jointlab
