#pragma once

#include <cstdint>
#include <vector>

#include "qread/core_model.hpp"
#include "qread/filter_state.hpp"

namespace qread {

// Normalized continuous observation record: dy_k is the increment of y over
// [t_k, t_{k+1}), in units of sqrt(time).
struct GaussianRecord {
  TimeGrid grid;
  std::vector<double> dy;  // K entries
};

// Running log-likelihood ratio against the null and the causal estimate
// mu(t_k), both on grid points. llr[0] == 0.
struct LLRTrace {
  TimeGrid grid;
  std::vector<double> llr;  // K+1 entries
  std::vector<double> mu;   // K+1 entries
};

struct FilterRun {
  std::vector<FilterState> states;  // K+1 entries
  LLRTrace trace;
};

// dy_k = sigma(t_k) x(t_k) dt + sqrt(dt) g_k with g_k standard normal.
GaussianRecord simulate_gaussian(const HypothesisModel& model, const HiddenTrajectory& traj,
                                 std::uint64_t seed);

// One split-step update of the unnormalized posterior: exp(dt L) followed by
// the multiplicative observation factor using the increment ahead of t_k
// (Ito convention), then renormalization with ln(total) added to log_scale.
FilterState dmz_step_numeric(const FilterState& state, const HypothesisModel& model, double dy_k,
                             std::size_t k, double dt);

// sigma * p1 / (p0 + p1); lies between 0 and sigma.
double estimator_mu(const FilterState& state, double sigma_k);

// Full split-step filter pass over a record. log_scale of the final state is
// the log total Zakai mass, i.e. the LLR against the null.
FilterRun dmz_filter_numeric(const HypothesisModel& model, const GaussianRecord& record);

// Closed form for models with no excitation: the x=1 mass is a geometric
// Brownian motion in the observation, the x=0 mass its decay integral.
// Ito sums and the time integrals use left endpoints.
FilterRun dmz_solve_no_excitation(const HypothesisModel& model, const GaussianRecord& record);

// Closed form for models with no decay, derived through the shifted
// observation dy' = dy - sigma dt. The returned masses are unnormalized with
// respect to that shifted reference, which leaves mu and the LLR unchanged.
FilterRun dmz_solve_no_decay(const HypothesisModel& model, const GaussianRecord& record);

// Estimator-correlator LLR: llr_{k+1} = llr_k + mu_k dy_k - dt mu_k^2 / 2,
// with mu_k computed before dy_k is consumed. Routes to a closed form when
// the model has identically zero excitation (or decay), else to the numeric
// split-step filter.
LLRTrace llr_estimator_correlator(const HypothesisModel& model, const GaussianRecord& record);

}  // namespace qread
