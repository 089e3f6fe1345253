#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qread/config.hpp"

namespace qread {

inline constexpr const char* kVersion = "qread 0.1.0";

struct RunSummary {
  Mode mode = Mode::simulate;
  std::vector<std::string> outputs;  // paths written, summary.json last
  nlohmann::json headline;
  double wall_ms = 0.0;  // reported to the caller, never serialized
};

// Executes one mode: simulate -> filter -> decide pipelines, the Monte Carlo
// harness, or one of the verification reports. Writes CSV traces and
// summary.json under config.out_dir. Identical config + seed produces
// byte-identical files.
RunSummary run(const ExperimentConfig& config, Mode mode);

}  // namespace qread
