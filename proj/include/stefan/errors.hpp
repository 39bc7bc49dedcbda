#pragma once

#include <stdexcept>
#include <string>

namespace stefan {

/// Malformed or inadmissible configuration (unknown key, nonpositive constant, guard violation).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero pivot in a banded solve.
class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or Inf appeared in a state.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A derived quantity contradicts a proved bound (e.g. minimal dwell >= maximal dwell).
class InternalConsistency : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Physical model validity conditions monitored during a run.
enum class Breach {
  InterfaceNonPositive,   // s <= 0
  InterfaceBeyondDomain,  // s >= L
  NonPositiveInput,       // q_j <= 0
  BelowMelting,           // T < Tm beyond tolerance
};

inline const char* to_string(Breach b) {
  switch (b) {
    case Breach::InterfaceNonPositive: return "interface_nonpositive";
    case Breach::InterfaceBeyondDomain: return "interface_beyond_domain";
    case Breach::NonPositiveInput: return "nonpositive_input";
    case Breach::BelowMelting: return "below_melting";
  }
  return "unknown";
}

class ValidityBreach : public std::runtime_error {
 public:
  ValidityBreach(Breach condition, double value, const std::string& what)
      : std::runtime_error(what), condition_(condition), value_(value) {}

  Breach condition() const noexcept { return condition_; }
  /// The offending value (s or q_j).
  double value() const noexcept { return value_; }

 private:
  Breach condition_;
  double value_;
};

}  // namespace stefan
