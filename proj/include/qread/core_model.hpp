#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qread/rate_schedule.hpp"
#include "qread/time_grid.hpp"

namespace qread {

// One hypothesis about the hidden two-state process and its signal amplitude.
// `amplitude` is the normalized Gaussian amplitude (per sqrt(time)) or the
// dimensionless Poisson contrast, depending on the channel it is used with.
struct HypothesisModel {
  std::string label;
  RateSchedule decay;       // rate 1 -> 0
  RateSchedule excitation;  // rate 0 -> 1
  RateSchedule amplitude;
  std::array<double, 2> initial_prob;

  HypothesisModel(std::string label_, RateSchedule decay_, RateSchedule excitation_,
                  RateSchedule amplitude_, std::array<double, 2> initial_prob_);

  // Full validation against a grid (array lengths, rate signs).
  void validate(const TimeGrid& grid) const;
};

struct HiddenTrajectory {
  TimeGrid grid;
  std::vector<std::uint8_t> x;  // K+1 samples, each 0 or 1
};

// Exact one-step transition matrix exp(dt*L) of the two-state rate matrix
// L = [[-e, d], [e, -d]] (d = decay, e = excitation), acting on column
// probability vectors: new_i = sum_j a(i,j) old_j. Columns sum to 1.
struct StepMatrix {
  double a00, a01, a10, a11;
};

// Uses L^2 = -(d+e) L, so exp(dt L) = I + q L with q = (1 - exp(-(d+e)dt))/(d+e).
StepMatrix rate_step_matrix(double decay, double excitation, double dt);

// Unconditional state probabilities P(x, t_k) on every grid point, stepped
// with the exact per-interval matrix exponential (exact for constant rates).
std::vector<std::array<double, 2>> kolmogorov_propagate(const HypothesisModel& model,
                                                        const TimeGrid& grid);

// Draws x(0) from initial_prob, then applies the exact one-step transition
// kernel per interval. Deterministic given the seed.
HiddenTrajectory sample_trajectory(const HypothesisModel& model, const TimeGrid& grid,
                                   std::uint64_t seed);

// Per-grid-point occupation frequencies over a set of trajectories on a
// common grid.
std::vector<std::array<double, 2>> empirical_occupation(
    const std::vector<HiddenTrajectory>& trajectories);

}  // namespace qread
