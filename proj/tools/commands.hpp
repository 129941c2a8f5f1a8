#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicdepth/approximation.hpp"
#include "logicdepth/expressiveness.hpp"
#include "logicdepth/quantized_net.hpp"

namespace logicdepth::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,   ///< bad input, failed precondition, IO failure
  kViolation = 2,     ///< a result contradicting the predicted outcome
};

/// One experiment run. Relative paths inside `parameters` resolve against
/// `base_dir`.
struct ExperimentConfig {
  std::string command;
  nlohmann::json parameters = nlohmann::json::object();
  fs::path output_dir = ".";
  std::uint64_t seed = 0;
  fs::path base_dir = ".";
};

/// Keys: command, parameters, output_dir, seed. Anything else is rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j, const fs::path& base_dir);
ExperimentConfig load_experiment_config(const fs::path& path);

struct CapacityParams {
  int w = 1;
  int n_max = 0;  ///< 0 means w + 2
  std::uint64_t budget = kDefaultSubsetBudget;
  bool timing = false;
};

struct CompileParams {
  std::optional<fs::path> weights;
  int random = 0;  ///< number of seeded random nets when no weights file is given
  RandomNetShape shape;
};

struct PipelineParams {
  fs::path config;
  int steps = 5;
  std::vector<std::string> prompt;  ///< seed history as symbols; empty means the first token
};

struct MetaphorParams {
  fs::path targets;
  fs::path basis;
  bool affine = true;
  Embedding embedding = Embedding::zero_one;
};

CapacityParams capacity_params(const nlohmann::json& p);
CompileParams compile_params(const nlohmann::json& p, const fs::path& base_dir);
PipelineParams pipeline_params(const nlohmann::json& p, const fs::path& base_dir);
MetaphorParams metaphor_params(const nlohmann::json& p, const fs::path& base_dir);

nlohmann::json to_json(const CapacityParams& p);
nlohmann::json to_json(const CompileParams& p);
nlohmann::json to_json(const PipelineParams& p);
nlohmann::json to_json(const MetaphorParams& p);

// Each command writes its report files plus manifest.json into `out` and
// returns an ExitCode. Library errors propagate as exceptions.

/// capacity.csv, capacity.json
int cmd_capacity(const CapacityParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log);
/// circuit.json + verification.json for a weights file; sweep.csv in random mode.
int cmd_compile(const CompileParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log);
/// trace.jsonl, summary.csv, null_space.json
int cmd_pipeline(const PipelineParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log);
/// metaphor.csv, reports.json, alias_classes.json
int cmd_metaphor(const MetaphorParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log);

/// Dispatches on cfg.command. Maps library and config errors to
/// kConfigError with a message on `log`.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace logicdepth::cli
