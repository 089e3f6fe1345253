#include "qread/runner.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>

#include "qread/csv_io.hpp"
#include "qread/decision.hpp"
#include "qread/gaussian_channel.hpp"
#include "qread/poisson_channel.hpp"
#include "qread/quantum_verify.hpp"
#include "qread/rng.hpp"

namespace qread {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string safe_label(const std::string& label) {
  std::string out;
  for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) != 0) ? c : '_';
  return out.empty() ? "h" : out;
}

struct Writer {
  fs::path dir;
  std::vector<std::string> written;

  fs::path reserve(const std::string& name) {
    fs::path p = dir / name;
    written.push_back(p.string());
    return p;
  }
};

// Per-mode sub-seeds follow the Monte Carlo trial layout: mix64(seed + i).
struct SeedSplit {
  std::uint64_t truth, trajectory, record;
  explicit SeedSplit(std::uint64_t seed)
      : truth(mix64(seed + 1)), trajectory(mix64(seed + 2)), record(mix64(seed + 3)) {}
};

json filter_all(const ExperimentConfig& config, Writer& writer, std::vector<double>& llrs) {
  const TimeGrid grid = config.grid();
  llrs.assign(config.models.size(), 0.0);
  json per_label = json::object();
  if (config.channel == ChannelKind::gaussian) {
    const GaussianRecord record = read_gaussian_record_csv(*config.record_path, grid);
    for (std::size_t m = 1; m < config.models.size(); ++m) {
      const LLRTrace trace = llr_estimator_correlator(config.models[m], record);
      write_llr_trace_csv(writer.reserve("llr_" + safe_label(config.models[m].label) + ".csv"),
                          trace);
      llrs[m] = trace.llr.back();
      per_label[config.models[m].label] = trace.llr.back();
    }
  } else {
    const CountRecord record = read_count_record_csv(*config.record_path, grid, *config.lambda0);
    for (std::size_t m = 1; m < config.models.size(); ++m) {
      const PoissonLLRTrace trace = llr_poisson(config.models[m], record);
      write_poisson_trace_csv(
          writer.reserve("llr_" + safe_label(config.models[m].label) + ".csv"), trace);
      llrs[m] = trace.llr.back();
      per_label[config.models[m].label] = trace.llr.back();
    }
  }
  per_label[config.models[0].label] = 0.0;
  return per_label;
}

json run_simulate(const ExperimentConfig& config, Writer& writer) {
  const TimeGrid grid = config.grid();
  const SeedSplit seeds(config.seed);
  std::size_t truth;
  if (config.true_hypothesis) {
    truth = *config.true_hypothesis;
  } else {
    Rng rng(seeds.truth);
    const double u = rng.uniform();
    double cum = 0.0;
    truth = config.models.size() - 1;
    for (std::size_t m = 0; m + 1 < config.models.size(); ++m) {
      cum += config.priors[m];
      if (u <= cum) {
        truth = m;
        break;
      }
    }
  }
  const HiddenTrajectory traj = sample_trajectory(config.models[truth], grid, seeds.trajectory);
  write_trajectory_csv(writer.reserve("trajectory.csv"), traj);
  json headline{{"true_hypothesis", truth}, {"label", config.models[truth].label}};
  if (config.channel == ChannelKind::gaussian) {
    const GaussianRecord record = simulate_gaussian(config.models[truth], traj, seeds.record);
    write_gaussian_record_csv(writer.reserve("record.csv"), record);
    double total = 0.0;
    for (double d : record.dy) total += d;
    headline["y_total"] = total;
  } else {
    const CountRecord record =
        simulate_poisson(config.models[truth], traj, *config.lambda0, seeds.record);
    write_count_record_csv(writer.reserve("record.csv"), record);
    std::size_t total = 0;
    for (auto d : record.dn) total += d;
    headline["n_total"] = total;
  }
  return headline;
}

json run_filter(const ExperimentConfig& config, Writer& writer, bool with_decision) {
  std::vector<double> llrs;
  json headline{{"final_llr", filter_all(config, writer, llrs)}};
  if (with_decision) {
    const DecisionResult d = decide(config.hypothesis_set(), llrs);
    headline["chosen"] = d.chosen;
    headline["chosen_label"] = config.models[d.chosen].label;
    headline["posteriors"] = d.posteriors;
  } else {
    const auto best = std::max_element(llrs.begin(), llrs.end());
    headline["max_llr"] = *best;
    headline["max_llr_label"] = config.models[best - llrs.begin()].label;
  }
  return headline;
}

json run_montecarlo(const ExperimentConfig& config) {
  const MonteCarloResult mc =
      monte_carlo_error_rate(config.hypothesis_set(), config.channel_spec(), config.trials,
                             config.grid(), config.seed, config.workers);
  json headline{{"pe_hat", mc.pe_hat},
                {"stderr", mc.stderr_},
                {"trials", mc.trials},
                {"confusion", mc.confusion},
                {"per_hypothesis", mc.per_hypothesis}};
  return headline;
}

json run_verify_quantum(const ExperimentConfig& config, Writer& writer) {
  const TimeGrid grid = config.grid();
  const SeedSplit seeds(config.seed);
  const HypothesisModel& model = config.models[config.hypothesis_index];

  RateSchedule dephasing = RateSchedule::zero();
  if (config.dephasing[config.hypothesis_index]) {
    dephasing = *config.dephasing[config.hypothesis_index];
  } else {
    // Default to the smallest admissible dephasing, sigma^2/4 pointwise.
    std::vector<double> lx(grid.points());
    for (std::size_t k = 0; k < grid.points(); ++k) {
      const double s = model.amplitude.at(k);
      lx[k] = 0.25 * s * s;
    }
    dephasing = RateSchedule(std::move(lx));
  }
  const QubitRates rates(model.decay, model.excitation, dephasing, model.amplitude);
  rates.validate(grid);

  const HiddenTrajectory traj = sample_trajectory(model, grid, seeds.trajectory);
  const GaussianRecord record = simulate_gaussian(model, traj, seeds.record);
  write_gaussian_record_csv(writer.reserve("record.csv"), record);

  // Start from the model prior with the largest coherence the positivity cone
  // allows.
  ConditionalDensityMatrix rho0;
  rho0.f00 = model.initial_prob[0];
  rho0.f11 = model.initial_prob[1];
  rho0.f01 = std::sqrt(rho0.f00 * rho0.f11);
  const DecouplingReport report = decoupling_report(rates, record, rho0);

  json sweep = json::array();
  for (const auto& [mult, gap] : report.sweep) sweep.push_back({{"dephasing_multiple", mult}, {"max_estimator_gap", gap}});
  return json{{"max_offdiag_influence", report.max_offdiag_influence},
              {"max_estimator_gap", report.max_estimator_gap},
              {"initial_coherence", std::abs(rho0.f01)},
              {"sweep", sweep}};
}

json run_verify_limit(const ExperimentConfig& config) {
  const TimeGrid grid = config.grid();
  const HypothesisModel& sigma_model = config.models[config.hypothesis_index];
  json lambdas = json::array();
  json medians = json::array();
  std::vector<double> med_values;
  for (std::size_t li = 0; li < config.lambda0_values.size(); ++li) {
    const double lam0 = config.lambda0_values[li];
    const double root = std::sqrt(lam0);
    // Poisson twin of the subject model: alpha = sigma / sqrt(lambda0).
    std::vector<double> alpha(grid.points());
    for (std::size_t k = 0; k < grid.points(); ++k) alpha[k] = sigma_model.amplitude.at(k) / root;
    const HypothesisModel alpha_model(sigma_model.label, sigma_model.decay,
                                      sigma_model.excitation, RateSchedule(std::move(alpha)),
                                      sigma_model.initial_prob);
    std::vector<double> gaps(config.limit_trials);
    for (std::size_t j = 0; j < config.limit_trials; ++j) {
      const std::uint64_t trial_seed = mix64(mix64(config.seed + li) + j);
      const HiddenTrajectory traj =
          sample_trajectory(alpha_model, grid, mix64(trial_seed + 2));
      const CountRecord record =
          simulate_poisson(alpha_model, traj, RateSchedule(lam0), mix64(trial_seed + 3));
      const double llr_p = llr_poisson(alpha_model, record).llr.back();
      const double llr_g =
          llr_estimator_correlator(sigma_model, gaussian_limit_transform(record)).llr.back();
      gaps[j] = std::abs(llr_p - llr_g);
    }
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double median = gaps[gaps.size() / 2];
    lambdas.push_back(lam0);
    medians.push_back(median);
    med_values.push_back(median);
  }
  bool decreasing = true;
  for (std::size_t i = 0; i + 1 < med_values.size(); ++i)
    if (!(med_values[i] > med_values[i + 1])) decreasing = false;
  return json{{"lambda0", lambdas},
              {"median_abs_llr_gap", medians},
              {"strictly_decreasing", decreasing}};
}

}  // namespace

RunSummary run(const ExperimentConfig& config, Mode mode) {
  const auto start = std::chrono::steady_clock::now();
  validate_for_mode(config, mode);

  Writer writer{fs::path(config.out_dir), {}};
  std::error_code ec;
  fs::create_directories(writer.dir, ec);
  if (ec) throw runtime_breach("cannot create output directory: " + writer.dir.string());

  RunSummary summary;
  summary.mode = mode;
  switch (mode) {
    case Mode::simulate: summary.headline = run_simulate(config, writer); break;
    case Mode::filter: summary.headline = run_filter(config, writer, false); break;
    case Mode::decide: summary.headline = run_filter(config, writer, true); break;
    case Mode::montecarlo: summary.headline = run_montecarlo(config); break;
    case Mode::verify_quantum: summary.headline = run_verify_quantum(config, writer); break;
    case Mode::verify_limit: summary.headline = run_verify_limit(config); break;
  }

  const fs::path summary_path = writer.reserve("summary.json");
  json doc{{"version", kVersion},
           {"mode", mode_name(mode)},
           {"seed", config.seed},
           {"outputs", writer.written},
           {"headline", summary.headline},
           {"config", config.echo}};
  std::ofstream out(summary_path, std::ios::binary);
  if (!out) throw runtime_breach("cannot open for writing: " + summary_path.string());
  out << doc.dump(2) << '\n';
  out.flush();
  if (!out) throw runtime_breach("write failed: " + summary_path.string());

  summary.outputs = writer.written;
  summary.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return summary;
}

}  // namespace qread
