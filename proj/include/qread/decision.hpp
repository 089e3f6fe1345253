#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qread/core_model.hpp"
#include "qread/rate_schedule.hpp"

namespace qread {

enum class ChannelKind { gaussian, poisson };

// Observation channel selection; the baseline intensity is only meaningful
// for the Poisson channel.
struct ChannelSpec {
  ChannelKind kind = ChannelKind::gaussian;
  std::optional<RateSchedule> lambda0;
};

// M >= 2 hypotheses with model 0 the null (identically zero amplitude) and
// strictly positive priors summing to 1.
struct HypothesisSet {
  std::vector<HypothesisModel> models;
  std::vector<double> priors;

  HypothesisSet(std::vector<HypothesisModel> models_, std::vector<double> priors_);
  void validate(const TimeGrid& grid, const ChannelSpec& channel) const;
};

struct DecisionResult {
  std::size_t chosen = 0;
  std::vector<double> posteriors;
  std::vector<double> llrs;
};

// Posterior weights proportional to exp(scores), computed with
// max-subtraction. Shift-invariant: adding a constant to every score leaves
// the result unchanged up to rounding.
std::vector<double> posterior_softmax(std::span<const double> scores);

// Maximum-posterior decision from final LLRs (llrs[0] == 0 by convention).
// Ties break toward the lowest index.
DecisionResult decide(const HypothesisSet& set, std::span<const double> llrs);

struct MatchedFilterPe {
  double pe_min = 0.0;
  double p_plus = 0.0;   // error probability given the null
  double p_minus = 0.0;  // error probability given the alternative
};

// Analytic minimum error probability for binary detection of a known
// deterministic signal: P(error|H0) = erfc(sqrt(SNR/8)(1 - 2 lambda/SNR))/2,
// P(error|H1) = erfc(sqrt(SNR/8)(1 + 2 lambda/SNR))/2, with
// lambda = ln P(H1)/P(H0). SNR = 0 decides on priors alone.
MatchedFilterPe matched_filter_pe(double snr, double log_prior_ratio);

struct MonteCarloResult {
  double pe_hat = 0.0;
  double stderr_ = 0.0;
  std::vector<std::vector<std::uint64_t>> confusion;  // [truth][chosen]
  std::vector<std::uint64_t> per_hypothesis;          // trials drawn per truth
  std::size_t trials = 0;
  std::uint64_t root_seed = 0;
};

// Simulate -> filter -> decide over N independent trials. Per-trial seeds
// derive from the root seed through mix64, and tallies are integers, so the
// result is independent of the worker count.
MonteCarloResult monte_carlo_error_rate(const HypothesisSet& set, const ChannelSpec& channel,
                                        std::size_t trials, const TimeGrid& grid,
                                        std::uint64_t root_seed, unsigned workers = 0);

}  // namespace qread
