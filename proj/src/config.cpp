#include "qread/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qread/poisson_channel.hpp"

namespace qread {

namespace {

using nlohmann::json;

class Violations {
 public:
  void add(std::string msg) { messages_.push_back(std::move(msg)); }
  bool empty() const { return messages_.empty(); }
  [[noreturn]] void raise() const { throw config_error(messages_); }
  void raise_if_any() const {
    if (!messages_.empty()) raise();
  }

 private:
  std::vector<std::string> messages_;
};

void check_keys(const json& obj, const std::set<std::string>& known, const std::string& where,
                Violations& v) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key())) v.add(where + ": unknown key '" + it.key() + "'");
  }
}

bool get_positive_number(const json& j, const std::string& where, Violations& v, double& out) {
  if (!j.is_number() || !(j.get<double>() > 0.0) || !std::isfinite(j.get<double>())) {
    v.add(where + ": must be a finite number > 0");
    return false;
  }
  out = j.get<double>();
  return true;
}

bool get_count(const json& j, const std::string& where, Violations& v, std::size_t& out,
               std::size_t min_value = 1) {
  if (!j.is_number_integer() || j.is_number_float() || j.get<std::int64_t>() < 0 ||
      static_cast<std::size_t>(j.get<std::int64_t>()) < min_value) {
    v.add(where + ": must be an integer >= " + std::to_string(min_value));
    return false;
  }
  out = static_cast<std::size_t>(j.get<std::int64_t>());
  return true;
}

// A schedule is a number or an array of K+1 numbers.
std::optional<RateSchedule> get_schedule(const json& j, const std::string& where,
                                         std::size_t points, Violations& v) {
  if (j.is_number()) {
    const double val = j.get<double>();
    if (!std::isfinite(val)) {
      v.add(where + ": nonfinite value");
      return std::nullopt;
    }
    return RateSchedule(val);
  }
  if (j.is_array()) {
    std::vector<double> vals;
    vals.reserve(j.size());
    for (const auto& e : j) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        v.add(where + ": array entries must be finite numbers");
        return std::nullopt;
      }
      vals.push_back(e.get<double>());
    }
    if (points != 0 && vals.size() != points) {
      v.add(where + ": array length must be K+1 = " + std::to_string(points));
      return std::nullopt;
    }
    return RateSchedule(std::move(vals));
  }
  v.add(where + ": must be a number or an array of numbers");
  return std::nullopt;
}

}  // namespace

std::optional<Mode> parse_mode(const std::string& name) {
  if (name == "simulate") return Mode::simulate;
  if (name == "filter") return Mode::filter;
  if (name == "decide") return Mode::decide;
  if (name == "montecarlo") return Mode::montecarlo;
  if (name == "verify-quantum") return Mode::verify_quantum;
  if (name == "verify-limit") return Mode::verify_limit;
  return std::nullopt;
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::simulate: return "simulate";
    case Mode::filter: return "filter";
    case Mode::decide: return "decide";
    case Mode::montecarlo: return "montecarlo";
    case Mode::verify_quantum: return "verify-quantum";
    case Mode::verify_limit: return "verify-limit";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  Violations v;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    v.add(std::string("not valid JSON: ") + e.what());
    v.raise();
  }
  if (!doc.is_object()) {
    v.add("top level must be a JSON object");
    v.raise();
  }

  static const std::set<std::string> kTopKeys = {
      "channel",       "grid",   "hypotheses",       "priors",        "lambda0",
      "seed",          "out",    "trials",           "mode",          "true_hypothesis",
      "hypothesis_index", "lambda0_values", "limit_trials", "record", "workers"};
  check_keys(doc, kTopKeys, "config", v);

  ExperimentConfig cfg;
  cfg.echo = doc;

  // channel
  if (!doc.contains("channel")) {
    v.add("config: missing required key 'channel'");
  } else if (!doc["channel"].is_string()) {
    v.add("channel: must be \"gaussian\" or \"poisson\"");
  } else {
    const std::string c = doc["channel"].get<std::string>();
    if (c == "gaussian")
      cfg.channel = ChannelKind::gaussian;
    else if (c == "poisson")
      cfg.channel = ChannelKind::poisson;
    else
      v.add("channel: must be \"gaussian\" or \"poisson\", got \"" + c + "\"");
  }

  // grid
  bool grid_ok = false;
  if (!doc.contains("grid")) {
    v.add("config: missing required key 'grid'");
  } else if (!doc["grid"].is_object()) {
    v.add("grid: must be an object {\"T\": ..., \"K\": ...}");
  } else {
    const json& g = doc["grid"];
    check_keys(g, {"T", "K"}, "grid", v);
    bool ok_t = false, ok_k = false;
    if (!g.contains("T"))
      v.add("grid: missing key 'T'");
    else
      ok_t = get_positive_number(g["T"], "grid.T", v, cfg.horizon);
    if (!g.contains("K"))
      v.add("grid: missing key 'K'");
    else
      ok_k = get_count(g["K"], "grid.K", v, cfg.steps);
    grid_ok = ok_t && ok_k;
  }
  const std::size_t points = grid_ok ? cfg.steps + 1 : 0;

  // hypotheses
  if (!doc.contains("hypotheses")) {
    v.add("config: missing required key 'hypotheses'");
  } else if (!doc["hypotheses"].is_array() || doc["hypotheses"].size() < 2) {
    v.add("hypotheses: must be an array of at least 2 hypothesis objects");
  } else {
    std::size_t index = 0;
    for (const auto& h : doc["hypotheses"]) {
      const std::string where = "hypotheses[" + std::to_string(index) + "]";
      if (!h.is_object()) {
        v.add(where + ": must be an object");
        ++index;
        continue;
      }
      check_keys(h, {"label", "decay", "excitation", "amplitude", "initial_prob", "dephasing"},
                 where, v);
      std::string label = "H" + std::to_string(index);
      if (h.contains("label")) {
        if (h["label"].is_string())
          label = h["label"].get<std::string>();
        else
          v.add(where + ".label: must be a string");
      }
      auto decay = h.contains("decay")
                       ? get_schedule(h["decay"], where + ".decay", points, v)
                       : std::optional<RateSchedule>(RateSchedule::zero());
      auto excitation = h.contains("excitation")
                            ? get_schedule(h["excitation"], where + ".excitation", points, v)
                            : std::optional<RateSchedule>(RateSchedule::zero());
      std::optional<RateSchedule> amplitude;
      if (!h.contains("amplitude"))
        v.add(where + ": missing key 'amplitude'");
      else
        amplitude = get_schedule(h["amplitude"], where + ".amplitude", points, v);
      std::array<double, 2> init{1.0, 0.0};
      bool init_ok = true;
      if (!h.contains("initial_prob")) {
        v.add(where + ": missing key 'initial_prob'");
        init_ok = false;
      } else if (!h["initial_prob"].is_array() || h["initial_prob"].size() != 2 ||
                 !h["initial_prob"][0].is_number() || !h["initial_prob"][1].is_number()) {
        v.add(where + ".initial_prob: must be an array of 2 numbers");
        init_ok = false;
      } else {
        init = {h["initial_prob"][0].get<double>(), h["initial_prob"][1].get<double>()};
      }
      std::optional<RateSchedule> deph;
      if (h.contains("dephasing")) {
        deph = get_schedule(h["dephasing"], where + ".dephasing", points, v);
        if (deph && deph->min_value() < 0.0) {
          v.add(where + ".dephasing: must be >= 0");
          deph.reset();
        }
      }
      if (decay && excitation && amplitude && init_ok) {
        try {
          cfg.models.emplace_back(label, *decay, *excitation, *amplitude, init);
          cfg.dephasing.push_back(deph);
        } catch (const std::invalid_argument& e) {
          v.add(where + ": " + e.what());
        }
      }
      ++index;
    }
  }
  const bool models_ok =
      doc.contains("hypotheses") && doc["hypotheses"].is_array() &&
      cfg.models.size() == doc["hypotheses"].size() && cfg.models.size() >= 2;

  // priors
  if (doc.contains("priors")) {
    if (!doc["priors"].is_array()) {
      v.add("priors: must be an array of probabilities");
    } else {
      double sum = 0.0;
      bool ok = true;
      for (const auto& p : doc["priors"]) {
        if (!p.is_number() || !(p.get<double>() > 0.0)) {
          v.add("priors: entries must be numbers > 0");
          ok = false;
          break;
        }
        cfg.priors.push_back(p.get<double>());
        sum += p.get<double>();
      }
      if (ok && models_ok && cfg.priors.size() != cfg.models.size())
        v.add("priors: length must match the number of hypotheses");
      if (ok && std::abs(sum - 1.0) > 1e-12) v.add("priors: must sum to 1 within 1e-12");
    }
  } else if (models_ok) {
    cfg.priors.assign(cfg.models.size(), 1.0 / static_cast<double>(cfg.models.size()));
  }

  // lambda0 and channel cross-checks
  if (doc.contains("lambda0")) {
    if (cfg.channel == ChannelKind::gaussian && doc.contains("channel"))
      v.add("lambda0: only valid with channel \"poisson\"");
    cfg.lambda0 = get_schedule(doc["lambda0"], "lambda0", points, v);
    if (cfg.lambda0 && !(cfg.lambda0->min_value() > 0.0)) {
      v.add("lambda0: must be > 0 everywhere");
      cfg.lambda0.reset();
    }
  } else if (cfg.channel == ChannelKind::poisson) {
    v.add("config: channel \"poisson\" requires key 'lambda0'");
  }

  if (cfg.channel == ChannelKind::poisson && models_ok && grid_ok && cfg.lambda0) {
    for (std::size_t m = 0; m < cfg.models.size(); ++m) {
      const auto& model = cfg.models[m];
      if (!(model.amplitude.min_value() > -1.0))
        v.add("hypotheses[" + std::to_string(m) +
              "].amplitude: poisson contrast must satisfy alpha > -1");
    }
    try {
      const TimeGrid grid = cfg.grid();
      double worst = 0.0;
      for (const auto& model : cfg.models)
        worst = std::max(worst, poisson_max_intensity(model, *cfg.lambda0, grid));
      if (worst * grid.dt() > 0.1) {
        const auto min_k = static_cast<std::size_t>(std::ceil(worst * cfg.horizon / 0.1));
        v.add("grid.K: max intensity * dt = " + std::to_string(worst * grid.dt()) +
              " exceeds 0.1; need K >= " + std::to_string(min_k));
      }
    } catch (const std::invalid_argument& e) {
      v.add(std::string("grid: ") + e.what());
    }
  }

  if (models_ok && !cfg.models[0].amplitude.identically_zero())
    v.add("hypotheses[0]: model 0 is the null and must have identically zero amplitude");

  // scalars
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<std::int64_t>() < 0)
      v.add("seed: must be a nonnegative integer");
    else
      cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string())
      v.add("out: must be a string path");
    else
      cfg.out_dir = doc["out"].get<std::string>();
  }
  if (doc.contains("trials")) get_count(doc["trials"], "trials", v, cfg.trials);
  if (doc.contains("limit_trials")) get_count(doc["limit_trials"], "limit_trials", v, cfg.limit_trials);
  if (doc.contains("workers")) {
    std::size_t w = 0;
    if (get_count(doc["workers"], "workers", v, w, 0)) cfg.workers = static_cast<unsigned>(w);
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string() || !parse_mode(doc["mode"].get<std::string>()))
      v.add("mode: must be one of simulate, filter, decide, montecarlo, verify-quantum, "
            "verify-limit");
    else
      cfg.mode = parse_mode(doc["mode"].get<std::string>());
  }
  if (doc.contains("record")) {
    if (!doc["record"].is_string())
      v.add("record: must be a string path");
    else
      cfg.record_path = doc["record"].get<std::string>();
  }
  if (doc.contains("true_hypothesis")) {
    std::size_t t = 0;
    if (get_count(doc["true_hypothesis"], "true_hypothesis", v, t, 0)) {
      if (models_ok && t >= cfg.models.size())
        v.add("true_hypothesis: index out of range");
      else
        cfg.true_hypothesis = t;
    }
  }
  if (doc.contains("hypothesis_index")) {
    std::size_t t = 0;
    if (get_count(doc["hypothesis_index"], "hypothesis_index", v, t, 0)) {
      if (models_ok && t >= cfg.models.size())
        v.add("hypothesis_index: index out of range");
      else
        cfg.hypothesis_index = t;
    }
  }
  if (doc.contains("lambda0_values")) {
    if (!doc["lambda0_values"].is_array() || doc["lambda0_values"].empty()) {
      v.add("lambda0_values: must be a nonempty array of numbers > 0");
    } else {
      cfg.lambda0_values.clear();
      for (const auto& e : doc["lambda0_values"]) {
        if (!e.is_number() || !(e.get<double>() > 0.0)) {
          v.add("lambda0_values: entries must be numbers > 0");
          break;
        }
        cfg.lambda0_values.push_back(e.get<double>());
      }
    }
  }

  v.raise_if_any();
  return cfg;
}

void validate_for_mode(const ExperimentConfig& config, Mode mode) {
  Violations v;
  const TimeGrid grid = config.grid();
  switch (mode) {
    case Mode::filter:
    case Mode::decide:
      if (!config.record_path)
        v.add(std::string(mode_name(mode)) + ": requires key 'record' (input record CSV path)");
      break;
    case Mode::verify_quantum: {
      if (config.channel != ChannelKind::gaussian)
        v.add("verify-quantum: requires channel \"gaussian\"");
      const auto& model = config.models[config.hypothesis_index];
      const auto& deph = config.dephasing[config.hypothesis_index];
      if (deph) {
        for (std::size_t k = 0; k < grid.points(); ++k) {
          const double s = model.amplitude.at(k);
          if (deph->at(k) < 0.25 * s * s) {
            v.add("hypotheses[" + std::to_string(config.hypothesis_index) +
                  "].dephasing: must be >= amplitude^2/4 at every grid point");
            break;
          }
        }
      }
      break;
    }
    case Mode::verify_limit: {
      if (config.channel != ChannelKind::gaussian)
        v.add("verify-limit: requires channel \"gaussian\" (the subject amplitude is sigma)");
      // The sweep simulates Poisson records for every lambda0 in the list;
      // the grid must keep each of them under the intensity bound.
      const auto& model = config.models[config.hypothesis_index];
      double sig_max = 0.0;
      for (std::size_t k = 0; k < grid.points(); ++k)
        sig_max = std::max(sig_max, std::max(model.amplitude.at(k), 0.0));
      for (double lam0 : config.lambda0_values) {
        const double worst = lam0 * (1.0 + sig_max / std::sqrt(lam0));
        if (worst * grid.dt() > 0.1) {
          const auto min_k = static_cast<std::size_t>(std::ceil(worst * config.horizon / 0.1));
          v.add("lambda0_values: intensity " + std::to_string(worst) + " * dt exceeds 0.1; need K >= " +
                std::to_string(min_k));
        }
      }
      break;
    }
    case Mode::simulate:
    case Mode::montecarlo:
      break;
  }
  v.raise_if_any();
}

}  // namespace qread
