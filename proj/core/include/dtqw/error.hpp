#pragma once

#include <stdexcept>
#include <string>

namespace dtqw {

/// Parameter outside its admissible range (angles, loss, parity, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Lattice too small for the requested number of shifts.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// The state carries (numerically) no probability left to normalize.
class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A closed-form quantity drifted outside its rounding tolerance.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Too few photon counts to estimate anything.
class StatisticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration document or CSV input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dtqw
