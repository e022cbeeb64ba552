#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ptz {

/// Raised when an exhaustive computation would exceed its size guard.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a structural assumption on the game does not hold.
class AssumptionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration that failed validation. Carries every violation found,
/// not just the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace ptz
