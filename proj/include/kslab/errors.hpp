#pragma once

#include <stdexcept>
#include <string>

namespace kslab {

/// Bad user-facing configuration or argument (CLI exit code 2).
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A solver or quadrature failed to produce a usable answer (CLI exit code 3).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A computed object violates one of its declared invariants (CLI exit code 4).
struct invariant_breach : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kslab
