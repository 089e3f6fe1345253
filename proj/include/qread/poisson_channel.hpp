#pragma once

#include <cstdint>
#include <vector>

#include "qread/core_model.hpp"
#include "qread/filter_state.hpp"
#include "qread/gaussian_channel.hpp"

namespace qread {

// Photon-counting record: dn_k in {0,1} is the count over [t_k, t_{k+1}).
// lambda0 is the strictly positive baseline intensity of the null hypothesis.
struct CountRecord {
  TimeGrid grid;
  std::vector<std::uint8_t> dn;  // K entries
  RateSchedule lambda0;
};

struct PoissonLLRTrace {
  TimeGrid grid;
  std::vector<double> llr;  // K+1 entries
  std::vector<double> nu;   // K+1 entries
};

struct PoissonFilterRun {
  std::vector<FilterState> states;  // K+1 entries
  PoissonLLRTrace trace;
};

// Largest intensity the model can produce against this baseline; the grid
// must keep it below 0.1 per step for the Bernoulli thinning to be valid.
double poisson_max_intensity(const HypothesisModel& model, const RateSchedule& lambda0,
                             const TimeGrid& grid);

// dn_k ~ Bernoulli(lambda(t_k) dt) with lambda = lambda0 (1 + alpha x).
// Requires alpha > -1 everywhere and max intensity * dt <= 0.1.
CountRecord simulate_poisson(const HypothesisModel& model, const HiddenTrajectory& traj,
                             const RateSchedule& lambda0, std::uint64_t seed);

// One split-step update against an arbitrary positive reference intensity
// kappa_k. The normalized posterior is kappa-invariant; log_scale accumulates
// the LLR against the null regardless of kappa (the deterministic
// reference-measure offset is removed inside the step).
FilterState poisson_dmz_step(const FilterState& state, const HypothesisModel& model,
                             const RateSchedule& lambda0, std::uint8_t dn_k, std::size_t k,
                             double dt, double kappa_k);

// Full filter pass; kappa defaults to lambda0.
PoissonFilterRun poisson_filter_numeric(const HypothesisModel& model, const CountRecord& record,
                                        const RateSchedule* kappa = nullptr);

// Closed forms for the two special cases, with left-endpoint sums.
PoissonFilterRun poisson_solve_no_excitation(const HypothesisModel& model,
                                             const CountRecord& record);
PoissonFilterRun poisson_solve_no_decay(const HypothesisModel& model, const CountRecord& record);

// llr_{k+1} = llr_k + dn_k ln(1 + nu_k) - dt lambda0_k nu_k, nu evaluated
// before dn_k is consumed. Routes like the Gaussian estimator-correlator.
PoissonLLRTrace llr_poisson(const HypothesisModel& model, const CountRecord& record);

// Centered, scaled counts: dy_k = (dn_k - lambda0 dt) / sqrt(lambda0).
// Requires a constant baseline.
GaussianRecord gaussian_limit_transform(const CountRecord& record);

}  // namespace qread
