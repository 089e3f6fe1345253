#pragma once

#include <cstddef>
#include <stdexcept>

namespace qread {

// Uniform discretization of [0, T] into K steps. All records, schedules and
// traces are indexed on one of these; increment k covers [t_k, t_{k+1}).
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
    if (steps == 0) throw std::invalid_argument("TimeGrid: steps must be >= 1");
  }

  double horizon() const { return horizon_; }
  std::size_t steps() const { return steps_; }
  std::size_t points() const { return steps_ + 1; }
  double dt() const { return horizon_ / static_cast<double>(steps_); }
  double time(std::size_t k) const { return static_cast<double>(k) * dt(); }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.horizon_ == b.horizon_ && a.steps_ == b.steps_;
  }

 private:
  double horizon_;
  std::size_t steps_;
};

}  // namespace qread
