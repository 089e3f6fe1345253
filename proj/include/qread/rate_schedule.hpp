#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qread/time_grid.hpp"

namespace qread {

// Piecewise-constant function of time: either a single constant or one value
// per grid point (K+1 entries). The value over [t_k, t_{k+1}) is the value at
// the left endpoint t_k. Used for transition rates, signal amplitudes and
// reference intensities; sign constraints are role-specific and enforced at
// the point of use.
class RateSchedule {
 public:
  RateSchedule(double constant) : constant_(constant) {}  // NOLINT: implicit by design
  explicit RateSchedule(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("RateSchedule: empty value array");
  }

  static RateSchedule zero() { return RateSchedule(0.0); }

  bool is_constant() const { return values_.empty(); }

  double at(std::size_t k) const { return values_.empty() ? constant_ : values_.at(k); }

  // Array schedules must carry one value per grid point.
  void check_grid(const TimeGrid& grid, const char* what) const {
    if (!values_.empty() && values_.size() != grid.points())
      throw std::invalid_argument(std::string(what) +
                                  ": schedule array length must equal grid points (K+1)");
    for_each_value([&](double v) {
      if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": schedule has nonfinite value");
    });
  }

  double min_value() const {
    if (values_.empty()) return constant_;
    return *std::min_element(values_.begin(), values_.end());
  }

  double max_value() const {
    if (values_.empty()) return constant_;
    return *std::max_element(values_.begin(), values_.end());
  }

  bool identically_zero() const { return min_value() == 0.0 && max_value() == 0.0; }

  template <class F>
  void for_each_value(F&& f) const {
    if (values_.empty()) {
      f(constant_);
    } else {
      for (double v : values_) f(v);
    }
  }

  const std::vector<double>& values() const { return values_; }
  double constant_value() const { return constant_; }

 private:
  double constant_ = 0.0;
  std::vector<double> values_;  // empty means constant
};

}  // namespace qread
