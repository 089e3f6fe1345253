#include "qread/gaussian_channel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qread/errors.hpp"
#include "qread/rng.hpp"

namespace qread {

namespace {

void check_record(const HypothesisModel& model, const GaussianRecord& record) {
  model.validate(record.grid);
  if (record.dy.size() != record.grid.steps())
    throw std::invalid_argument("GaussianRecord: dy length must equal grid steps");
  for (double v : record.dy) {
    if (!std::isfinite(v)) throw std::invalid_argument("GaussianRecord: nonfinite increment");
  }
}

// Shared LLR/mu bookkeeping: given per-point filter states, accumulate the
// estimator-correlator sum with left-endpoint integrands.
LLRTrace correlate(const HypothesisModel& model, const GaussianRecord& record,
                   const std::vector<FilterState>& states) {
  const double dt = record.grid.dt();
  LLRTrace trace{record.grid, std::vector<double>(record.grid.points(), 0.0),
                 std::vector<double>(record.grid.points(), 0.0)};
  for (std::size_t k = 0; k < record.grid.points(); ++k)
    trace.mu[k] = estimator_mu(states[k], model.amplitude.at(k));
  for (std::size_t k = 0; k < record.grid.steps(); ++k) {
    const double mu = trace.mu[k];
    trace.llr[k + 1] = trace.llr[k] + mu * record.dy[k] - 0.5 * dt * mu * mu;
  }
  return trace;
}

}  // namespace

GaussianRecord simulate_gaussian(const HypothesisModel& model, const HiddenTrajectory& traj,
                                 std::uint64_t seed) {
  model.validate(traj.grid);
  if (traj.x.size() != traj.grid.points())
    throw std::invalid_argument("simulate_gaussian: trajectory length mismatch");
  const double dt = traj.grid.dt();
  const double sqrt_dt = std::sqrt(dt);
  Rng rng(seed);
  GaussianRecord record{traj.grid, std::vector<double>(traj.grid.steps())};
  for (std::size_t k = 0; k < traj.grid.steps(); ++k)
    record.dy[k] = model.amplitude.at(k) * traj.x[k] * dt + sqrt_dt * rng.normal();
  return record;
}

FilterState dmz_step_numeric(const FilterState& state, const HypothesisModel& model, double dy_k,
                             std::size_t k, double dt) {
  if (!std::isfinite(dy_k) || !std::isfinite(state.p0) || !std::isfinite(state.p1))
    throw std::invalid_argument("dmz_step_numeric: nonfinite input");
  const StepMatrix a = rate_step_matrix(model.decay.at(k), model.excitation.at(k), dt);
  FilterState next = state;
  next.log_scale +=
      detail::gaussian_split_step(next.p0, next.p1, a, model.amplitude.at(k), dy_k, dt);
  return next;
}

double estimator_mu(const FilterState& state, double sigma_k) {
  const double total = state.total();
  if (!(total > 0.0)) throw std::invalid_argument("estimator_mu: zero total mass");
  return sigma_k * state.p1 / total;
}

FilterRun dmz_filter_numeric(const HypothesisModel& model, const GaussianRecord& record) {
  check_record(model, record);
  const double dt = record.grid.dt();
  std::vector<FilterState> states(record.grid.points());
  states[0] = FilterState{model.initial_prob[0], model.initial_prob[1], 0.0};
  for (std::size_t k = 0; k < record.grid.steps(); ++k) {
    states[k + 1] = dmz_step_numeric(states[k], model, record.dy[k], k, dt);
    if (!std::isfinite(states[k + 1].log_scale) || !(states[k + 1].total() > 0.0))
      throw runtime_breach("dmz_filter_numeric: state degenerate at step " + std::to_string(k));
  }
  return FilterRun{states, correlate(model, record, states)};
}

FilterRun dmz_solve_no_excitation(const HypothesisModel& model, const GaussianRecord& record) {
  check_record(model, record);
  if (!model.excitation.identically_zero())
    throw std::invalid_argument("dmz_solve_no_excitation: excitation must be identically zero");
  const double dt = record.grid.dt();
  std::vector<FilterState> states(record.grid.points());
  double exponent = 0.0;  // log of the x=1 mass relative to its initial value
  double p0_raw = model.initial_prob[0];
  for (std::size_t k = 0; k <= record.grid.steps(); ++k) {
    const double p1_raw = model.initial_prob[1] * std::exp(exponent);
    const double sum = p0_raw + p1_raw;
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw runtime_breach("dmz_solve_no_excitation: mass degenerate at step " +
                           std::to_string(k));
    states[k] = FilterState{p0_raw / sum, p1_raw / sum, std::log(sum)};
    if (k == record.grid.steps()) break;
    const double sigma = model.amplitude.at(k);
    const double dec = model.decay.at(k);
    p0_raw += dt * dec * p1_raw;
    exponent += sigma * record.dy[k] - dt * (0.5 * sigma * sigma + dec);
  }
  return FilterRun{states, correlate(model, record, states)};
}

FilterRun dmz_solve_no_decay(const HypothesisModel& model, const GaussianRecord& record) {
  check_record(model, record);
  if (!model.decay.identically_zero())
    throw std::invalid_argument("dmz_solve_no_decay: decay must be identically zero");
  const double dt = record.grid.dt();
  std::vector<FilterState> states(record.grid.points());
  double exponent = 0.0;  // log of the x=0 mass relative to its initial value
  double p1_raw = model.initial_prob[1];
  for (std::size_t k = 0; k <= record.grid.steps(); ++k) {
    const double p0_raw = model.initial_prob[0] * std::exp(exponent);
    const double sum = p0_raw + p1_raw;
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw runtime_breach("dmz_solve_no_decay: mass degenerate at step " + std::to_string(k));
    states[k] = FilterState{p0_raw / sum, p1_raw / sum, std::log(sum)};
    if (k == record.grid.steps()) break;
    const double sigma = model.amplitude.at(k);
    const double exc = model.excitation.at(k);
    p1_raw += dt * exc * p0_raw;
    exponent += -sigma * record.dy[k] + dt * (0.5 * sigma * sigma - exc);
  }
  return FilterRun{states, correlate(model, record, states)};
}

LLRTrace llr_estimator_correlator(const HypothesisModel& model, const GaussianRecord& record) {
  if (model.excitation.identically_zero())
    return dmz_solve_no_excitation(model, record).trace;
  if (model.decay.identically_zero()) return dmz_solve_no_decay(model, record).trace;
  return dmz_filter_numeric(model, record).trace;
}

}  // namespace qread
