#pragma once

#include <stdexcept>
#include <string>

namespace robba {

// Base class for every error the library throws deliberately.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: bad JSON, bad rational strings, unknown keys or kinds.
struct parse_error : error {
    using error::error;
};

// A documented hypothesis of an operation does not hold for the given input.
struct precondition_error : error {
    using error::error;
};

// The computation cannot certify its result at the requested truncation
// order or iteration budget; retrying with larger knobs may succeed.
struct precision_error : error {
    using error::error;
};

} // namespace robba
