#pragma once

#include <stdexcept>
#include <string>

namespace matder {

/// Caller broke a contract: mixed rings, invalid arguments, unknown names.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed textual input: ring specs, element texts, scenario files.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A black box produced something the engine cannot certify: a value whose
/// finite support could not be established within budget, a wrong-ring
/// entry, or a non-canonical accessor list. Decomposition maps this to
/// `inconclusive`.
class ProbeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probe budget exhausted; decomposition maps this to `inconclusive`.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal signal: a named check failed with a witness (serialized JSON).
/// Pipeline drivers catch this and turn it into a `refuted` report.
class RefutationError : public std::runtime_error {
 public:
  RefutationError(std::string check, std::string witness_json)
      : std::runtime_error("refuted by check '" + check + "'"),
        check_(std::move(check)),
        witness_(std::move(witness_json)) {}

  const std::string& check() const { return check_; }
  const std::string& witness_json() const { return witness_; }

 private:
  std::string check_;
  std::string witness_;
};

}  // namespace matder
