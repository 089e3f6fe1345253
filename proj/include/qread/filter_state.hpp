#pragma once

#include <cmath>

#include "qread/core_model.hpp"

namespace qread {

// Unnormalized two-point posterior mass, kept normalized to unit sum with the
// overall scale carried in log_scale: true mass = (p0, p1) * exp(log_scale).
struct FilterState {
  double p0 = 0.0;
  double p1 = 0.0;
  double log_scale = 0.0;

  double total() const { return p0 + p1; }
};

namespace detail {

// One Gaussian split-step update on a raw two-point mass: Markov substep
// exp(dt L), then the observation factor exp(sigma dy - sigma^2 dt / 2) on
// the x=1 component, then renormalization. Returns ln of the pre-normalization
// total. Shared verbatim by the classical filter and the quantum master
// equation so their diagonals evolve identically.
inline double gaussian_split_step(double& p0, double& p1, const StepMatrix& a, double sigma,
                                  double dy, double dt) {
  const double m0 = a.a00 * p0 + a.a01 * p1;
  const double m1 = (a.a10 * p0 + a.a11 * p1) * std::exp(sigma * dy - 0.5 * sigma * sigma * dt);
  const double sum = m0 + m1;
  p0 = m0 / sum;
  p1 = m1 / sum;
  return std::log(sum);
}

}  // namespace detail
}  // namespace qread
