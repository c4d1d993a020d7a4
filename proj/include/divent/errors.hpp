#pragma once

#include <stdexcept>
#include <string>

namespace divent {

// Raised when a request is well-formed but cannot be satisfied: a degenerate
// variance where a standardized statistic is needed, an exact-enumeration
// size beyond the guard, and similar. Callers that map errors to process
// exit codes treat this differently from malformed input.
class infeasible_error : public std::runtime_error {
public:
    explicit infeasible_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace divent
