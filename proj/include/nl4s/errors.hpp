#pragma once

#include <stdexcept>
#include <string>

namespace nl4s {

/// Invalid configuration or violated hypothesis. Surfaced before any compute
/// where possible; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical guard tripped (aliasing, non-finite state, under-resolution).
/// The CLI maps it to exit code 3.
class NumericalGuardError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Homogeneous norm of negative order requested on a field whose zero mode
/// carries non-negligible mass.
class ZeroModeObstruction : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Operation called on a field held in the wrong representation.
class SpaceMismatch : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

}  // namespace nl4s
