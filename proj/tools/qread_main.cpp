#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qread/config.hpp"
#include "qread/runner.hpp"

namespace {

// Exit codes: 0 success, 2 configuration rejected, 3 runtime failure.
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int run_mode(qread::Mode mode, const CliOptions& opts) {
  std::ifstream in(opts.config_path, std::ios::binary);
  if (!in) {
    nlohmann::json err{{"error", {{"kind", "io"}, {"message", "cannot read config file: " + opts.config_path}}}};
    std::cerr << err.dump() << '\n';
    return kExitRuntime;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();

  try {
    qread::ExperimentConfig config = qread::parse_config(buffer.str());
    if (opts.seed_set) config.seed = opts.seed;
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    const qread::RunSummary summary = qread::run(config, mode);
    std::cout << "wrote " << summary.outputs.back() << '\n';
    std::cout << summary.headline.dump(2) << '\n';
    std::fprintf(stderr, "[%s] %s done in %.1f ms\n", qread::kVersion,
                 qread::mode_name(mode), summary.wall_ms);
    return 0;
  } catch (const qread::config_error& e) {
    nlohmann::json err{{"error", {{"kind", "config"}, {"violations", e.violations()}}}};
    std::cerr << err.dump(2) << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    nlohmann::json err{{"error", {{"kind", "runtime"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous qubit-readout simulation, filtering and decision toolkit"};
  app.require_subcommand(1);

  CliOptions opts;
  const std::pair<const char*, qread::Mode> modes[] = {
      {"simulate", qread::Mode::simulate},
      {"filter", qread::Mode::filter},
      {"decide", qread::Mode::decide},
      {"montecarlo", qread::Mode::montecarlo},
      {"verify-quantum", qread::Mode::verify_quantum},
      {"verify-limit", qread::Mode::verify_limit},
  };
  static const char* kDescriptions[] = {
      "sample a hidden trajectory and an observation record",
      "run the causal filters over a recorded observation",
      "filter a record and pick the maximum-posterior hypothesis",
      "estimate the decision error rate by Monte Carlo",
      "check that the quantum conditional state reduces to the classical filter",
      "check convergence of the counting channel to the diffusive one",
  };

  int selected = -1;
  int index = 0;
  for (const auto& [name, mode] : modes) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions[index]);
    sub->add_option("--config", opts.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "override the config seed")
        ->each([&](const std::string&) { opts.seed_set = true; });
    sub->add_option("--out", opts.out_dir, "override the output directory");
    const int mode_index = index;
    sub->callback([&selected, mode_index] { selected = mode_index; });
    ++index;
  }

  CLI11_PARSE(app, argc, argv);
  return run_mode(modes[selected].second, opts);
}
