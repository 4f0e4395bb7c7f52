#pragma once

#include <stdexcept>

namespace jcas {

// Invalid or inconsistent configuration (bad counts, unknown keys, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a link-budget function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Environment or policy used out of order, or fed malformed input.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Optimisation produced a non-finite loss or gradient.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace jcas
