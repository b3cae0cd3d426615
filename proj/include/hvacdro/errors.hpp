#pragma once

#include <stdexcept>
#include <string>

namespace hvacdro {

/// Malformed or inconsistent caller input (length mismatch, bad coefficients).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but outside the region where an operation is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The optimization model has no feasible schedule. `family()` names the
/// constraint group whose removal restores feasibility, when one was found.
class InfeasibleModel : public std::runtime_error {
 public:
  InfeasibleModel(const std::string& family, const std::string& what)
      : std::runtime_error(what), family_(family) {}

  const std::string& family() const noexcept { return family_; }

 private:
  std::string family_;
};

}  // namespace hvacdro
