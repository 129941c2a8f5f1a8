#include "commands.hpp"

#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "logicdepth/errors.hpp"
#include "logicdepth/format.hpp"
#include "logicdepth/net_compiler.hpp"
#include "logicdepth/pipeline.hpp"
#include "logicdepth/random.hpp"

namespace logicdepth::cli {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ConfigError(what + ": unknown key '" + key + "'");
  }
}

template <class T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(what + "." + key + " has the wrong type");
  }
}

int get_int(const json& j, const std::string& key, int fallback, const std::string& what) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) throw ConfigError(what + "." + key + " must be an integer");
  return j.at(key).get<int>();
}

fs::path get_path(const json& j, const std::string& key, const fs::path& base, const std::string& what) {
  if (!j.contains(key)) throw ConfigError(what + ": missing '" + key + "'");
  const fs::path p(get_or<std::string>(j, key, "", what));
  return p.is_absolute() ? p : base / p;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("write failed for '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

void prepare_out(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out.string() + "': " + ec.message());
}

void write_manifest(const fs::path& out, const std::string& command, const json& params,
                    std::uint64_t seed, const std::vector<std::string>& files) {
  write_json(out / "manifest.json", json{{"command", command},
                                         {"parameters", params},
                                         {"seed", seed},
                                         {"rng", Rng::kName},
                                         {"outputs", files}});
}

std::string path_text(const fs::path& p) { return p.generic_string(); }

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j, const fs::path& base_dir) {
  check_keys(j, {"command", "parameters", "output_dir", "seed"}, "experiment config");
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  if (!j.contains("command") || !j["command"].is_string()) {
    throw ConfigError("experiment config: 'command' must be a string");
  }
  cfg.command = j["command"].get<std::string>();
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw ConfigError("experiment config: 'parameters' must be an object");
    cfg.parameters = j["parameters"];
  }
  if (j.contains("output_dir")) {
    const fs::path out(get_or<std::string>(j, "output_dir", ".", "experiment config"));
    cfg.output_dir = out.is_absolute() ? out : base_dir / out;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) {
      throw ConfigError("experiment config: 'seed' must be a non-negative integer");
    }
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return experiment_config_from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

CapacityParams capacity_params(const json& p) {
  const std::string what = "capacity parameters";
  check_keys(p, {"w", "n_max", "budget", "timing"}, what);
  CapacityParams c;
  c.w = get_int(p, "w", c.w, what);
  c.n_max = get_int(p, "n_max", 0, what);
  if (c.n_max == 0) c.n_max = c.w + 2;
  if (p.contains("budget") && !p["budget"].is_number_unsigned()) {
    throw ConfigError(what + ".budget must be a non-negative integer");
  }
  c.budget = get_or<std::uint64_t>(p, "budget", c.budget, what);
  c.timing = get_or<bool>(p, "timing", false, what);
  return c;
}

CompileParams compile_params(const json& p, const fs::path& base_dir) {
  const std::string what = "compile parameters";
  check_keys(p, {"weights", "random", "max_depth", "max_width", "input_bits", "bit_width", "activation"},
             what);
  CompileParams c;
  if (p.contains("weights")) c.weights = get_path(p, "weights", base_dir, what);
  c.random = get_int(p, "random", 0, what);
  c.shape.max_depth = get_int(p, "max_depth", c.shape.max_depth, what);
  c.shape.max_width = get_int(p, "max_width", c.shape.max_width, what);
  c.shape.input_bits = get_int(p, "input_bits", c.shape.input_bits, what);
  c.shape.bit_width = get_int(p, "bit_width", c.shape.bit_width, what);
  if (p.contains("activation")) {
    try {
      c.shape.activation = activation_from_string(get_or<std::string>(p, "activation", "", what));
    } catch (const DomainError& e) {
      throw ConfigError(what + ".activation: " + e.what());
    }
  }
  if (c.weights && c.random > 0) throw ConfigError(what + ": give either 'weights' or 'random', not both");
  if (!c.weights && c.random <= 0) throw ConfigError(what + ": need 'weights' or a positive 'random'");
  return c;
}

PipelineParams pipeline_params(const json& p, const fs::path& base_dir) {
  const std::string what = "pipeline parameters";
  check_keys(p, {"config", "steps", "prompt"}, what);
  PipelineParams c;
  c.config = get_path(p, "config", base_dir, what);
  c.steps = get_int(p, "steps", c.steps, what);
  c.prompt = get_or<std::vector<std::string>>(p, "prompt", {}, what);
  return c;
}

MetaphorParams metaphor_params(const json& p, const fs::path& base_dir) {
  const std::string what = "metaphor parameters";
  check_keys(p, {"targets", "basis", "affine", "embedding"}, what);
  MetaphorParams c;
  c.targets = get_path(p, "targets", base_dir, what);
  c.basis = get_path(p, "basis", base_dir, what);
  c.affine = get_or<bool>(p, "affine", c.affine, what);
  if (p.contains("embedding")) c.embedding = embedding_from_string(get_or<std::string>(p, "embedding", "", what));
  return c;
}

json to_json(const CapacityParams& p) {
  return {{"w", p.w}, {"n_max", p.n_max}, {"budget", p.budget}, {"timing", p.timing}};
}

json to_json(const CompileParams& p) {
  json j{{"random", p.random},
         {"max_depth", p.shape.max_depth},
         {"max_width", p.shape.max_width},
         {"input_bits", p.shape.input_bits},
         {"bit_width", p.shape.bit_width},
         {"activation", to_string(p.shape.activation)}};
  if (p.weights) j["weights"] = path_text(*p.weights);
  return j;
}

json to_json(const PipelineParams& p) {
  return {{"config", path_text(p.config)}, {"steps", p.steps}, {"prompt", p.prompt}};
}

json to_json(const MetaphorParams& p) {
  return {{"targets", path_text(p.targets)},
          {"basis", path_text(p.basis)},
          {"affine", p.affine},
          {"embedding", to_string(p.embedding)}};
}

int cmd_capacity(const CapacityParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  if (p.w < 1) throw PreconditionError("capacity: w must be >= 1");
  if (p.n_max < p.w + 1) {
    throw PreconditionError("capacity: n_max=" + std::to_string(p.n_max) + " but n >= w + 1 = " +
                            std::to_string(p.w + 1) + " is required");
  }
  if (p.n_max > kMaxAtoms) {
    throw PreconditionError("capacity: n_max=" + std::to_string(p.n_max) + " exceeds " +
                            std::to_string(kMaxAtoms));
  }
  prepare_out(out);
  CapacityOptions opts;
  opts.subset_budget = p.budget;

  std::string csv = capacity_csv_header() + "\n";
  json rows = json::array();
  int representable = 0;
  for (int n = p.w + 1; n <= p.n_max; ++n) {
    const auto r = exhaust_capacity(p.w, n, opts);
    csv += to_csv_row(r, p.timing) + "\n";
    rows.push_back(to_json(r, p.timing));
    if (r.representable) {
      ++representable;
      log << "capacity: at_least_" << p.w + 1 << "_of_" << n << " is representable at width " << p.w
          << "\n";
    }
  }
  write_file(out / "capacity.csv", csv);
  write_json(out / "capacity.json", rows);
  write_manifest(out, "capacity", to_json(p), seed, {"capacity.csv", "capacity.json"});
  log << "capacity: " << rows.size() << " rows, " << representable << " representable\n";
  return representable ? kViolation : kOk;
}

namespace {

json pair_json(const std::optional<IndistinguishablePair>& pair) {
  if (!pair) return nullptr;
  return json{{"x", pair->x}, {"y", pair->y}};
}

// Re-derives the collision from the network itself rather than the tables.
bool pair_holds(const QuantizedNet& net, const IndistinguishablePair& pair) {
  return pair.x != pair.y && net.evaluate(pair.x) == net.evaluate(pair.y);
}

int compile_one(const CompileParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  const auto net = load_weights(p.weights->string());
  const auto circuit = compile_net(net);
  const auto report = verify_compilation(circuit);
  const auto pair = find_indistinguishable_pair(circuit);

  json v{{"verified", report.verified},
         {"first_failing_input", nullptr},
         {"input_bits", net.input_bits()},
         {"trace_bits", circuit.trace_bits()},
         {"indistinguishable_pair", pair_json(pair)}};
  if (report.first_failing_input) v["first_failing_input"] = *report.first_failing_input;

  write_json(out / "circuit.json", to_json(circuit));
  write_json(out / "verification.json", v);
  write_manifest(out, "compile", to_json(p), seed, {"circuit.json", "verification.json"});

  log << "compile: " << (report.verified ? "verified" : "NOT verified");
  if (pair) log << ", collision " << pair->x << " ~ " << pair->y;
  else log << ", no collision";
  log << "\n";

  if (!report.verified) return kViolation;
  if (pair && !pair_holds(net, *pair)) return kViolation;
  if (!pair && circuit.trace_bits() < net.input_bits()) return kViolation;
  return kOk;
}

int compile_sweep(const CompileParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  Rng rng(seed);
  std::string csv = "index,depth,width,input_bits,trace_bits,verified,pair_x,pair_y\n";
  int violations = 0;
  for (int i = 0; i < p.random; ++i) {
    const auto net = random_net(rng, p.shape);
    const auto circuit = compile_net(net);
    const bool verified = verify_compilation(circuit).verified;
    const auto pair = find_indistinguishable_pair(circuit);
    const bool ok = verified && (pair ? pair_holds(net, *pair) : circuit.trace_bits() >= net.input_bits());
    if (!ok) ++violations;
    csv += std::to_string(i) + "," + std::to_string(net.depth()) + "," + std::to_string(net.width()) + "," +
           std::to_string(net.input_bits()) + "," + std::to_string(circuit.trace_bits()) + "," +
           (verified ? "true" : "false") + "," + (pair ? std::to_string(pair->x) : "") + "," +
           (pair ? std::to_string(pair->y) : "") + "\n";
  }
  write_file(out / "sweep.csv", csv);
  write_manifest(out, "compile", to_json(p), seed, {"sweep.csv"});
  log << "compile: " << p.random << " random nets, " << violations << " violations\n";
  return violations ? kViolation : kOk;
}

}  // namespace

int cmd_compile(const CompileParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  prepare_out(out);
  return p.weights ? compile_one(p, out, seed, log) : compile_sweep(p, out, seed, log);
}

int cmd_pipeline(const PipelineParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  // Load and shape-check before anything is written.
  const auto cfg = load_pipeline_config(p.config.string());
  if (p.steps < 1) throw PreconditionError("pipeline: steps must be >= 1");
  std::vector<std::size_t> history;
  for (const auto& s : p.prompt) history.push_back(tokenize(cfg, s));
  if (history.empty()) history.push_back(0);

  prepare_out(out);
  const auto traces = run(cfg, history, p.steps);
  std::string jsonl;
  std::string csv = "step,input_token,selected_token,residual\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    jsonl += to_json(t, i).dump() + "\n";
    csv += std::to_string(i) + "," + csv_field(detokenize(cfg, t.input_token)) + "," +
           csv_field(detokenize(cfg, t.selected_token)) + "," + format_double(t.hallucination_residual) +
           "\n";
  }
  const auto ns = null_space_report(cfg);
  write_file(out / "trace.jsonl", jsonl);
  write_file(out / "summary.csv", csv);
  write_json(out / "null_space.json", to_json(ns));
  write_manifest(out, "pipeline", to_json(p), seed, {"trace.jsonl", "summary.csv", "null_space.json"});
  log << "pipeline: " << traces.size() << " steps, rank " << ns.rank << ", " << ns.aliased.size()
      << " aliased pairs\n";
  return kOk;
}

int cmd_metaphor(const MetaphorParams& p, const fs::path& out, std::uint64_t seed, std::ostream& log) {
  const auto targets = load_family(p.targets.string());
  const auto basis = load_family(p.basis.string());
  if (targets.empty() || basis.empty()) throw ConfigError("metaphor: targets and basis must be non-empty");
  if (!(*targets.universe() == *basis.universe())) {
    throw ConfigError("metaphor: targets have " + std::to_string(targets.universe()->n_atoms()) +
                      " atoms but basis has " + std::to_string(basis.universe()->n_atoms()));
  }
  prepare_out(out);
  ApproxOptions opts;
  opts.affine = p.affine;
  opts.embedding = p.embedding;

  std::string csv = approx_csv_header() + "\n";
  json reports = json::array();
  for (const auto& t : targets) {
    const auto r = approximate(t, basis, opts);
    csv += to_csv_row(r) + "\n";
    reports.push_back(to_json(r));
  }
  const auto classes = alias_classes(basis, targets, opts);
  write_file(out / "metaphor.csv", csv);
  write_json(out / "reports.json", reports);
  write_json(out / "alias_classes.json", classes);
  write_manifest(out, "metaphor", to_json(p), seed, {"metaphor.csv", "reports.json", "alias_classes.json"});
  log << "metaphor: " << targets.size() << " targets, " << classes.size() << " alias classes\n";
  return kOk;
}

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    if (cfg.command == "capacity") {
      return cmd_capacity(capacity_params(cfg.parameters), cfg.output_dir, cfg.seed, log);
    }
    if (cfg.command == "compile") {
      return cmd_compile(compile_params(cfg.parameters, cfg.base_dir), cfg.output_dir, cfg.seed, log);
    }
    if (cfg.command == "pipeline") {
      return cmd_pipeline(pipeline_params(cfg.parameters, cfg.base_dir), cfg.output_dir, cfg.seed, log);
    }
    if (cfg.command == "metaphor") {
      return cmd_metaphor(metaphor_params(cfg.parameters, cfg.base_dir), cfg.output_dir, cfg.seed, log);
    }
    log << "error: unknown command '" << cfg.command << "'\n";
    return kConfigError;
  } catch (const CompileError& e) {
    log << "error: " << e.what() << "\n";
  } catch (const std::invalid_argument& e) {  // PreconditionError
    log << "error: " << e.what() << "\n";
  } catch (const std::domain_error& e) {
    log << "error: " << e.what() << "\n";
  } catch (const std::runtime_error& e) {  // ConfigError and IO
    log << "error: " << e.what() << "\n";
  }
  return kConfigError;
}

}  // namespace logicdepth::cli
