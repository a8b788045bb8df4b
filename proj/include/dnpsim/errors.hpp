#pragma once

#include <stdexcept>
#include <string>

namespace dnpsim {

// Every failure the library reports derives from one of these. The CLI maps
// them onto exit codes (see tools/dnpsim.cpp).

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct GeometryError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Malformed lattice, grid or time-grid request.
struct SpecError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Dense quantum reference asked for more spins than it supports.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

/// No event can fire (total rate is zero).
struct StallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The non-Zeeman block could not be inverted during adiabatic elimination.
struct EliminationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Config file failed schema validation.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Adiabatic validity check failed and no override was given.
struct ValidityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dnpsim
