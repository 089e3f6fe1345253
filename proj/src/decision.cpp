#include "qread/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "qread/gaussian_channel.hpp"
#include "qread/poisson_channel.hpp"
#include "qread/rng.hpp"

namespace qread {

HypothesisSet::HypothesisSet(std::vector<HypothesisModel> models_, std::vector<double> priors_)
    : models(std::move(models_)), priors(std::move(priors_)) {
  if (models.size() < 2) throw std::invalid_argument("HypothesisSet: need at least 2 hypotheses");
  if (priors.size() != models.size())
    throw std::invalid_argument("HypothesisSet: priors length must match models");
  double sum = 0.0;
  for (double p : priors) {
    if (!(p > 0.0)) throw std::invalid_argument("HypothesisSet: priors must be > 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("HypothesisSet: priors must sum to 1 within 1e-12");
  if (!models[0].amplitude.identically_zero())
    throw std::invalid_argument("HypothesisSet: model 0 must be the null (zero amplitude)");
}

void HypothesisSet::validate(const TimeGrid& grid, const ChannelSpec& channel) const {
  for (const auto& m : models) m.validate(grid);
  if (channel.kind == ChannelKind::poisson) {
    if (!channel.lambda0.has_value())
      throw std::invalid_argument("HypothesisSet: poisson channel requires lambda0");
    for (const auto& m : models) {
      m.amplitude.for_each_value([](double a) {
        if (!(a > -1.0))
          throw std::invalid_argument(
              "HypothesisSet: amplitude schedule not usable as poisson alpha (alpha > -1)");
      });
    }
  }
}

std::vector<double> posterior_softmax(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("posterior_softmax: empty scores");
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

DecisionResult decide(const HypothesisSet& set, std::span<const double> llrs) {
  if (llrs.size() != set.models.size())
    throw std::invalid_argument("decide: llr count must match hypothesis count");
  std::vector<double> scores(llrs.size());
  for (std::size_t m = 0; m < llrs.size(); ++m) {
    if (!std::isfinite(llrs[m])) throw std::invalid_argument("decide: nonfinite llr");
    scores[m] = llrs[m] + std::log(set.priors[m]);
  }
  DecisionResult result;
  result.llrs.assign(llrs.begin(), llrs.end());
  result.posteriors = posterior_softmax(scores);
  result.chosen = static_cast<std::size_t>(
      std::max_element(scores.begin(), scores.end()) - scores.begin());
  return result;
}

MatchedFilterPe matched_filter_pe(double snr, double log_prior_ratio) {
  if (!(snr >= 0.0)) throw std::invalid_argument("matched_filter_pe: snr must be >= 0");
  const double p1 = std::exp(log_prior_ratio) / (1.0 + std::exp(log_prior_ratio));
  const double p0 = 1.0 - p1;
  MatchedFilterPe out;
  if (snr == 0.0) {
    // No signal energy: decide on priors alone, ties toward the null.
    out.p_plus = log_prior_ratio > 0.0 ? 1.0 : 0.0;
    out.p_minus = log_prior_ratio > 0.0 ? 0.0 : 1.0;
    out.pe_min = out.p_plus * p0 + out.p_minus * p1;
    return out;
  }
  const double u = std::sqrt(snr / 8.0);
  out.p_plus = 0.5 * std::erfc(u * (1.0 - 2.0 * log_prior_ratio / snr));
  out.p_minus = 0.5 * std::erfc(u * (1.0 + 2.0 * log_prior_ratio / snr));
  out.pe_min = out.p_plus * p0 + out.p_minus * p1;
  return out;
}

namespace {

std::size_t draw_hypothesis(const std::vector<double>& priors, double u) {
  double cum = 0.0;
  for (std::size_t m = 0; m + 1 < priors.size(); ++m) {
    cum += priors[m];
    if (u <= cum) return m;
  }
  return priors.size() - 1;
}

struct Tally {
  std::vector<std::vector<std::uint64_t>> confusion;
  explicit Tally(std::size_t m)
      : confusion(m, std::vector<std::uint64_t>(m, 0)) {}
  void merge(const Tally& other) {
    for (std::size_t i = 0; i < confusion.size(); ++i)
      for (std::size_t j = 0; j < confusion.size(); ++j)
        confusion[i][j] += other.confusion[i][j];
  }
};

void run_trials(const HypothesisSet& set, const ChannelSpec& channel, const TimeGrid& grid,
                std::uint64_t root_seed, std::size_t begin, std::size_t end, Tally& tally) {
  const std::size_t m_count = set.models.size();
  std::vector<double> llrs(m_count, 0.0);
  for (std::size_t trial = begin; trial < end; ++trial) {
    const std::uint64_t trial_seed = mix64(root_seed + trial);
    Rng hyp_rng(mix64(trial_seed + 1));
    const std::size_t truth = draw_hypothesis(set.priors, hyp_rng.uniform());
    const HiddenTrajectory traj =
        sample_trajectory(set.models[truth], grid, mix64(trial_seed + 2));
    const std::uint64_t record_seed = mix64(trial_seed + 3);
    llrs[0] = 0.0;
    if (channel.kind == ChannelKind::gaussian) {
      const GaussianRecord record = simulate_gaussian(set.models[truth], traj, record_seed);
      for (std::size_t m = 1; m < m_count; ++m)
        llrs[m] = llr_estimator_correlator(set.models[m], record).llr.back();
    } else {
      const CountRecord record =
          simulate_poisson(set.models[truth], traj, *channel.lambda0, record_seed);
      for (std::size_t m = 1; m < m_count; ++m)
        llrs[m] = llr_poisson(set.models[m], record).llr.back();
    }
    const DecisionResult d = decide(set, llrs);
    ++tally.confusion[truth][d.chosen];
  }
}

}  // namespace

MonteCarloResult monte_carlo_error_rate(const HypothesisSet& set, const ChannelSpec& channel,
                                        std::size_t trials, const TimeGrid& grid,
                                        std::uint64_t root_seed, unsigned workers) {
  if (trials == 0) throw std::invalid_argument("monte_carlo_error_rate: need trials >= 1");
  set.validate(grid, channel);
  if (channel.kind == ChannelKind::poisson) {
    for (const auto& m : set.models) {
      if (poisson_max_intensity(m, *channel.lambda0, grid) * grid.dt() > 0.1)
        throw std::invalid_argument(
            "monte_carlo_error_rate: max intensity * dt exceeds 0.1; refine the grid");
    }
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));

  const std::size_t m_count = set.models.size();
  std::vector<Tally> tallies(workers, Tally(m_count));
  if (workers == 1) {
    run_trials(set, channel, grid, root_seed, 0, trials, tallies[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(trials, begin + chunk);
      pool.emplace_back([&, begin, end, w] {
        run_trials(set, channel, grid, root_seed, begin, end, tallies[w]);
      });
    }
    for (auto& t : pool) t.join();
  }

  MonteCarloResult result;
  Tally total(m_count);
  for (const auto& t : tallies) total.merge(t);
  result.confusion = total.confusion;
  result.per_hypothesis.assign(m_count, 0);
  std::uint64_t correct = 0;
  for (std::size_t i = 0; i < m_count; ++i) {
    for (std::size_t j = 0; j < m_count; ++j) result.per_hypothesis[i] += total.confusion[i][j];
    correct += total.confusion[i][i];
  }
  result.trials = trials;
  result.root_seed = root_seed;
  result.pe_hat =
      static_cast<double>(trials - correct) / static_cast<double>(trials);
  result.stderr_ = std::sqrt(result.pe_hat * (1.0 - result.pe_hat) / static_cast<double>(trials));
  return result;
}

}  // namespace qread
