#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qread {

// Configuration rejected before any computation started. Carries every
// violation found, not just the first.
class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "invalid configuration:";
    for (const auto& m : v) {
      s += "\n  - ";
      s += m;
    }
    return s;
  }

  std::vector<std::string> violations_;
};

// Invariant breach detected mid-run (nonfinite state, positivity loss, file
// mismatch). Messages include the offending time index where applicable.
class runtime_breach : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qread
