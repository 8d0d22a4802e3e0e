#pragma once

#include <stdexcept>
#include <string>

namespace bforge {

// Malformed input: bad table shape, negative entry, unparsable rational.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mathematically meaningless request (p = q for the Urysohn map, ...).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Well-formed but inadmissible argument (anchor not in collection, ...).
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A request that cannot be met at the current truncation depth.
struct DepthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bforge
