#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "logicdepth/errors.hpp"

namespace cli = logicdepth::cli;
using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"Expressiveness experiments for depth-bounded logic predicates and quantized nets"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "Experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Seed for randomized sweeps");

  json params = json::object();

  auto* capacity = app.add_subcommand("capacity", "Exhaustive width-w capacity check over atom subsets");
  int w = 1;
  int n_max = 0;
  std::uint64_t budget = logicdepth::kDefaultSubsetBudget;
  bool timing = false;
  capacity->add_option("--w", w, "Layer width")->required();
  capacity->add_option("--n-max", n_max, "Largest atom count (default w + 2)");
  capacity->add_option("--budget", budget, "Subset budget per row");
  capacity->add_flag("--timing", timing, "Record elapsed seconds (breaks byte-identical reruns)");

  auto* compile = app.add_subcommand("compile", "Compile a quantized net into bit predicates and verify");
  std::string weights;
  int random = 0;
  logicdepth::RandomNetShape shape;
  std::string activation = "clipped_relu";
  auto* weights_opt = compile->add_option("--weights", weights, "Weights JSON file")->check(CLI::ExistingFile);
  auto* random_opt = compile->add_option("--random", random, "Number of seeded random nets");
  weights_opt->excludes(random_opt);
  compile->add_option("--max-depth", shape.max_depth, "Random mode: maximum depth");
  compile->add_option("--max-width", shape.max_width, "Random mode: maximum width");
  compile->add_option("--input-bits", shape.input_bits, "Random mode: input bits");
  compile->add_option("--bit-width", shape.bit_width, "Random mode: node bit width");
  compile->add_option("--activation", activation, "Random mode: sign | clipped_relu | identity");

  auto* pipeline = app.add_subcommand("pipeline", "Run the token generation chain");
  std::string pipeline_path;
  int steps = 5;
  std::vector<std::string> prompt;
  pipeline->add_option("--pipeline", pipeline_path, "Pipeline config JSON")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--steps", steps, "Number of steps");
  pipeline->add_option("--prompt", prompt, "Seed history symbols");

  auto* metaphor = app.add_subcommand("metaphor", "Least-squares approximation of targets by a basis");
  std::string targets;
  std::string basis;
  bool affine = true;
  std::string embedding = "01";
  metaphor->add_option("--targets", targets, "Target predicate file")->required()->check(CLI::ExistingFile);
  metaphor->add_option("--basis", basis, "Basis predicate file")->required()->check(CLI::ExistingFile);
  metaphor->add_option("--affine", affine, "Include an intercept column");
  metaphor->add_option("--embedding", embedding, "01 | pm1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  cli::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      if (!app.get_subcommands().empty()) {
        std::cerr << "error: --config cannot be combined with a subcommand\n";
        return cli::kConfigError;
      }
      cfg = cli::load_experiment_config(config_path);
    } else if (app.got_subcommand(capacity)) {
      cfg.command = "capacity";
      params = {{"w", w}, {"n_max", n_max}, {"budget", budget}, {"timing", timing}};
    } else if (app.got_subcommand(compile)) {
      cfg.command = "compile";
      params = {{"max_depth", shape.max_depth},
                {"max_width", shape.max_width},
                {"input_bits", shape.input_bits},
                {"bit_width", shape.bit_width},
                {"activation", activation}};
      if (!weights.empty()) params["weights"] = weights;
      if (random > 0) params["random"] = random;
    } else if (app.got_subcommand(pipeline)) {
      cfg.command = "pipeline";
      params = {{"config", pipeline_path}, {"steps", steps}, {"prompt", prompt}};
    } else if (app.got_subcommand(metaphor)) {
      cfg.command = "metaphor";
      params = {{"targets", targets}, {"basis", basis}, {"affine", affine}, {"embedding", embedding}};
    } else {
      std::cerr << app.help();
      return cli::kConfigError;
    }
  } catch (const logicdepth::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kConfigError;
  }

  if (config_path.empty()) cfg.parameters = params;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (seed) cfg.seed = *seed;
  return cli::run_experiment(cfg, std::cerr);
}
