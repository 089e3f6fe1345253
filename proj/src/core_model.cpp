#include "qread/core_model.hpp"

#include <cmath>
#include <stdexcept>

#include "qread/rng.hpp"

namespace qread {

HypothesisModel::HypothesisModel(std::string label_, RateSchedule decay_,
                                 RateSchedule excitation_, RateSchedule amplitude_,
                                 std::array<double, 2> initial_prob_)
    : label(std::move(label_)),
      decay(std::move(decay_)),
      excitation(std::move(excitation_)),
      amplitude(std::move(amplitude_)),
      initial_prob(initial_prob_) {
  for (double p : initial_prob) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("HypothesisModel: initial_prob entries must lie in [0,1]");
  }
  if (std::abs(initial_prob[0] + initial_prob[1] - 1.0) > 1e-12)
    throw std::invalid_argument("HypothesisModel: initial_prob must sum to 1 within 1e-12");
  decay.for_each_value([](double v) {
    if (v < 0.0) throw std::invalid_argument("HypothesisModel: decay rate must be >= 0");
  });
  excitation.for_each_value([](double v) {
    if (v < 0.0) throw std::invalid_argument("HypothesisModel: excitation rate must be >= 0");
  });
}

void HypothesisModel::validate(const TimeGrid& grid) const {
  decay.check_grid(grid, "decay");
  excitation.check_grid(grid, "excitation");
  amplitude.check_grid(grid, "amplitude");
}

StepMatrix rate_step_matrix(double decay, double excitation, double dt) {
  const double s = decay + excitation;
  // q = (1 - e^{-s dt}) / s, with the s -> 0 limit q = dt.
  const double q = s > 0.0 ? -std::expm1(-s * dt) / s : dt;
  return StepMatrix{1.0 - excitation * q, decay * q, excitation * q, 1.0 - decay * q};
}

std::vector<std::array<double, 2>> kolmogorov_propagate(const HypothesisModel& model,
                                                        const TimeGrid& grid) {
  model.validate(grid);
  const double dt = grid.dt();
  std::vector<std::array<double, 2>> out(grid.points());
  out[0] = model.initial_prob;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const StepMatrix a = rate_step_matrix(model.decay.at(k), model.excitation.at(k), dt);
    const auto& p = out[k];
    out[k + 1] = {a.a00 * p[0] + a.a01 * p[1], a.a10 * p[0] + a.a11 * p[1]};
  }
  return out;
}

HiddenTrajectory sample_trajectory(const HypothesisModel& model, const TimeGrid& grid,
                                   std::uint64_t seed) {
  model.validate(grid);
  const double dt = grid.dt();
  Rng rng(seed);
  HiddenTrajectory traj{grid, std::vector<std::uint8_t>(grid.points())};
  traj.x[0] = rng.bernoulli(model.initial_prob[1]) ? 1 : 0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    const StepMatrix a = rate_step_matrix(model.decay.at(k), model.excitation.at(k), dt);
    // One uniform per step regardless of state, so streams have fixed layout.
    const double flip = traj.x[k] ? a.a01 : a.a10;
    const bool jump = rng.bernoulli(flip);
    traj.x[k + 1] = jump ? (1 - traj.x[k]) : traj.x[k];
  }
  return traj;
}

std::vector<std::array<double, 2>> empirical_occupation(
    const std::vector<HiddenTrajectory>& trajectories) {
  if (trajectories.empty())
    throw std::invalid_argument("empirical_occupation: empty trajectory list");
  const TimeGrid grid = trajectories.front().grid;
  for (const auto& t : trajectories) {
    if (!(t.grid == grid))
      throw std::invalid_argument("empirical_occupation: trajectories on different grids");
  }
  std::vector<std::array<double, 2>> out(grid.points());
  for (std::size_t k = 0; k < grid.points(); ++k) {
    std::size_t ones = 0;
    for (const auto& t : trajectories) ones += t.x[k];
    const double f = static_cast<double>(ones) / static_cast<double>(trajectories.size());
    out[k] = {1.0 - f, f};
  }
  return out;
}

}  // namespace qread
