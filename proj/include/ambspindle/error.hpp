#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ambspindle {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or incomplete input: syntax errors, missing fields, bad CSV.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what, std::optional<int> line = std::nullopt)
      : Error(line ? what + " (line " + std::to_string(*line) + ")" : what), line_(line) {}

  std::optional<int> line() const { return line_; }

 private:
  std::optional<int> line_;
};

// Input that parsed but violates a record invariant. Every violation is listed.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed:";
    for (const auto& s : v) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> violations_;
};

// A well-formed request outside the domain of a model (gap closure, reversed
// pressure ratio, aliasing, double safety-factor application, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Raised when a speed grid is too coarse to bracket mode/1x crossings.
class RefinementRequired : public NumericalError {
 public:
  RefinementRequired(const std::string& what, std::size_t interval)
      : NumericalError(what), interval_(interval) {}
  std::size_t interval() const { return interval_; }

 private:
  std::size_t interval_;
};

}  // namespace ambspindle
