#include "qread/poisson_channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qread/errors.hpp"
#include "qread/rng.hpp"

namespace qread {

namespace {

constexpr double kMaxIntensityDt = 0.1;

void check_alpha(const HypothesisModel& model) {
  model.amplitude.for_each_value([](double a) {
    if (!(a > -1.0))
      throw std::invalid_argument("poisson channel: amplitude alpha must satisfy alpha > -1");
  });
}

void check_lambda0(const RateSchedule& lambda0) {
  lambda0.for_each_value([](double v) {
    if (!(v > 0.0)) throw std::invalid_argument("poisson channel: lambda0 must be > 0");
  });
}

void check_record(const HypothesisModel& model, const CountRecord& record) {
  model.validate(record.grid);
  check_alpha(model);
  check_lambda0(record.lambda0);
  record.lambda0.check_grid(record.grid, "lambda0");
  if (record.dn.size() != record.grid.steps())
    throw std::invalid_argument("CountRecord: dn length must equal grid steps");
  for (std::uint8_t v : record.dn) {
    if (v > 1) throw std::invalid_argument("CountRecord: dn entries must be 0 or 1");
  }
}

PoissonLLRTrace correlate(const HypothesisModel& model, const CountRecord& record,
                          const std::vector<FilterState>& states) {
  const double dt = record.grid.dt();
  PoissonLLRTrace trace{record.grid, std::vector<double>(record.grid.points(), 0.0),
                        std::vector<double>(record.grid.points(), 0.0)};
  for (std::size_t k = 0; k < record.grid.points(); ++k)
    trace.nu[k] = estimator_mu(states[k], model.amplitude.at(k));
  for (std::size_t k = 0; k < record.grid.steps(); ++k) {
    const double nu = trace.nu[k];
    if (!(1.0 + nu > 0.0))
      throw runtime_breach("llr_poisson: estimator reached nu <= -1 at step " +
                           std::to_string(k));
    trace.llr[k + 1] =
        trace.llr[k] + record.dn[k] * std::log1p(nu) - dt * record.lambda0.at(k) * nu;
  }
  return trace;
}

}  // namespace

double poisson_max_intensity(const HypothesisModel& model, const RateSchedule& lambda0,
                             const TimeGrid& grid) {
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.points(); ++k) {
    const double boost = std::max(model.amplitude.at(k), 0.0);
    worst = std::max(worst, lambda0.at(k) * (1.0 + boost));
  }
  return worst;
}

CountRecord simulate_poisson(const HypothesisModel& model, const HiddenTrajectory& traj,
                             const RateSchedule& lambda0, std::uint64_t seed) {
  model.validate(traj.grid);
  check_alpha(model);
  check_lambda0(lambda0);
  lambda0.check_grid(traj.grid, "lambda0");
  if (traj.x.size() != traj.grid.points())
    throw std::invalid_argument("simulate_poisson: trajectory length mismatch");
  const double dt = traj.grid.dt();
  if (poisson_max_intensity(model, lambda0, traj.grid) * dt > kMaxIntensityDt)
    throw std::invalid_argument(
        "simulate_poisson: max intensity * dt exceeds 0.1; refine the grid");
  Rng rng(seed);
  CountRecord record{traj.grid, std::vector<std::uint8_t>(traj.grid.steps()), lambda0};
  for (std::size_t k = 0; k < traj.grid.steps(); ++k) {
    const double lam = lambda0.at(k) * (1.0 + model.amplitude.at(k) * traj.x[k]);
    record.dn[k] = rng.bernoulli(lam * dt) ? 1 : 0;
  }
  return record;
}

FilterState poisson_dmz_step(const FilterState& state, const HypothesisModel& model,
                             const RateSchedule& lambda0, std::uint8_t dn_k, std::size_t k,
                             double dt, double kappa_k) {
  if (!(kappa_k > 0.0)) throw std::invalid_argument("poisson_dmz_step: kappa must be > 0");
  if (dn_k > 1) throw std::invalid_argument("poisson_dmz_step: dn must be 0 or 1");
  const double lam0 = lambda0.at(k);
  const double alpha = model.amplitude.at(k);
  const StepMatrix a = rate_step_matrix(model.decay.at(k), model.excitation.at(k), dt);

  // Reference-measure factor shared by both components, and the extra factor
  // carried by the x=1 component. With kappa == lambda0 the common factor
  // is 1 and the step reduces to the kappa-free form.
  const double common = (dn_k ? lam0 / kappa_k : 1.0) * std::exp((kappa_k - lam0) * dt);
  double f1 = std::exp(-lam0 * alpha * dt);
  if (dn_k) f1 *= 1.0 + alpha;

  FilterState next;
  const double m0 = (a.a00 * state.p0 + a.a01 * state.p1) * common;
  const double m1 = (a.a10 * state.p0 + a.a11 * state.p1) * common * f1;
  const double sum = m0 + m1;
  next.p0 = m0 / sum;
  next.p1 = m1 / sum;
  // Remove the deterministic offset of the kappa reference so log_scale
  // reports the LLR against the null for any kappa.
  next.log_scale = state.log_scale + std::log(sum) -
                   (dn_k ? std::log(lam0 / kappa_k) : 0.0) - (kappa_k - lam0) * dt;
  return next;
}

PoissonFilterRun poisson_filter_numeric(const HypothesisModel& model, const CountRecord& record,
                                        const RateSchedule* kappa) {
  check_record(model, record);
  if (kappa != nullptr) kappa->check_grid(record.grid, "kappa");
  const double dt = record.grid.dt();
  std::vector<FilterState> states(record.grid.points());
  states[0] = FilterState{model.initial_prob[0], model.initial_prob[1], 0.0};
  for (std::size_t k = 0; k < record.grid.steps(); ++k) {
    const double kap = kappa != nullptr ? kappa->at(k) : record.lambda0.at(k);
    states[k + 1] = poisson_dmz_step(states[k], model, record.lambda0, record.dn[k], k, dt, kap);
    if (!std::isfinite(states[k + 1].log_scale) || !(states[k + 1].total() > 0.0))
      throw runtime_breach("poisson_filter_numeric: state degenerate at step " +
                           std::to_string(k));
  }
  return PoissonFilterRun{states, correlate(model, record, states)};
}

PoissonFilterRun poisson_solve_no_excitation(const HypothesisModel& model,
                                             const CountRecord& record) {
  check_record(model, record);
  if (!model.excitation.identically_zero())
    throw std::invalid_argument(
        "poisson_solve_no_excitation: excitation must be identically zero");
  const double dt = record.grid.dt();
  std::vector<FilterState> states(record.grid.points());
  double exponent = 0.0;
  double p0_raw = model.initial_prob[0];
  for (std::size_t k = 0; k <= record.grid.steps(); ++k) {
    const double p1_raw = model.initial_prob[1] * std::exp(exponent);
    const double sum = p0_raw + p1_raw;
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw runtime_breach("poisson_solve_no_excitation: mass degenerate at step " +
                           std::to_string(k));
    states[k] = FilterState{p0_raw / sum, p1_raw / sum, std::log(sum)};
    if (k == record.grid.steps()) break;
    const double alpha = model.amplitude.at(k);
    const double dec = model.decay.at(k);
    p0_raw += dt * dec * p1_raw;
    exponent += record.dn[k] * std::log1p(alpha) - dt * (record.lambda0.at(k) * alpha + dec);
  }
  return PoissonFilterRun{states, correlate(model, record, states)};
}

PoissonFilterRun poisson_solve_no_decay(const HypothesisModel& model, const CountRecord& record) {
  check_record(model, record);
  if (!model.decay.identically_zero())
    throw std::invalid_argument("poisson_solve_no_decay: decay must be identically zero");
  const double dt = record.grid.dt();
  std::vector<FilterState> states(record.grid.points());
  double exponent = 0.0;
  double p1_raw = model.initial_prob[1];
  for (std::size_t k = 0; k <= record.grid.steps(); ++k) {
    const double p0_raw = model.initial_prob[0] * std::exp(exponent);
    const double sum = p0_raw + p1_raw;
    if (!(sum > 0.0) || !std::isfinite(sum))
      throw runtime_breach("poisson_solve_no_decay: mass degenerate at step " +
                           std::to_string(k));
    states[k] = FilterState{p0_raw / sum, p1_raw / sum, std::log(sum)};
    if (k == record.grid.steps()) break;
    const double alpha = model.amplitude.at(k);
    const double exc = model.excitation.at(k);
    p1_raw += dt * exc * p0_raw;
    exponent += -record.dn[k] * std::log1p(alpha) + dt * (record.lambda0.at(k) * alpha - exc);
  }
  return PoissonFilterRun{states, correlate(model, record, states)};
}

PoissonLLRTrace llr_poisson(const HypothesisModel& model, const CountRecord& record) {
  if (model.excitation.identically_zero())
    return poisson_solve_no_excitation(model, record).trace;
  if (model.decay.identically_zero()) return poisson_solve_no_decay(model, record).trace;
  return poisson_filter_numeric(model, record).trace;
}

GaussianRecord gaussian_limit_transform(const CountRecord& record) {
  check_lambda0(record.lambda0);
  if (!record.lambda0.is_constant())
    throw std::invalid_argument("gaussian_limit_transform: lambda0 must be constant");
  const double lam0 = record.lambda0.constant_value();
  const double dt = record.grid.dt();
  const double root = std::sqrt(lam0);
  GaussianRecord out{record.grid, std::vector<double>(record.grid.steps())};
  for (std::size_t k = 0; k < record.grid.steps(); ++k)
    out.dy[k] = (record.dn[k] - lam0 * dt) / root;
  return out;
}

}  // namespace qread
