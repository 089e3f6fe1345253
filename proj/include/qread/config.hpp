#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qread/core_model.hpp"
#include "qread/decision.hpp"
#include "qread/errors.hpp"

namespace qread {

enum class Mode { simulate, filter, decide, montecarlo, verify_quantum, verify_limit };

std::optional<Mode> parse_mode(const std::string& name);
const char* mode_name(Mode mode);

// Validated experiment description. Parsed from a single JSON document;
// unknown keys are rejected and every violation is reported at once.
struct ExperimentConfig {
  ChannelKind channel = ChannelKind::gaussian;
  double horizon = 1.0;
  std::size_t steps = 1;
  std::vector<HypothesisModel> models;
  std::vector<std::optional<RateSchedule>> dephasing;  // parallel to models
  std::vector<double> priors;
  std::optional<RateSchedule> lambda0;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::size_t trials = 10000;
  unsigned workers = 0;
  std::optional<std::size_t> true_hypothesis;  // simulate: truth index; default draws from priors
  std::size_t hypothesis_index = 1;            // verify-quantum subject
  std::vector<double> lambda0_values{100.0, 1000.0, 10000.0};  // verify-limit sweep
  std::size_t limit_trials = 100;
  std::optional<std::string> record_path;
  std::optional<Mode> mode;
  nlohmann::json echo;  // the document as parsed, for summaries

  TimeGrid grid() const { return TimeGrid(horizon, steps); }
  ChannelSpec channel_spec() const { return ChannelSpec{channel, lambda0}; }
  HypothesisSet hypothesis_set() const { return HypothesisSet(models, priors); }
};

// Parses and validates; throws config_error carrying all violations.
ExperimentConfig parse_config(const std::string& text);

// Mode-specific requirements (input record present, dephasing bound,
// verify-limit grid bound). Throws config_error; called before any
// computation starts.
void validate_for_mode(const ExperimentConfig& config, Mode mode);

}  // namespace qread
