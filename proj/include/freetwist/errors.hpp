#pragma once
#include <stdexcept>
#include <string>

namespace freetwist {

// Caller handed us data that violates a documented precondition.
struct precondition_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configured search/resource cap was hit before the answer was found.
struct resource_limit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The requested operation is not supported for this configuration.
struct unsupported_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Malformed textual input (slopes, matrices, words, configs).
struct parse_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace freetwist
