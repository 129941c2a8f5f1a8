#include "commands.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "logicdepth/errors.hpp"

namespace cli = logicdepth::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kFixtures = LOGICDEPTH_FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(LOGICDEPTH_SCRATCH_DIR) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int run(const std::string& command, json params, const fs::path& out, std::uint64_t seed = 0) {
  cli::ExperimentConfig cfg;
  cfg.command = command;
  cfg.parameters = std::move(params);
  cfg.output_dir = out;
  cfg.seed = seed;
  cfg.base_dir = kFixtures;
  std::ostringstream log;
  return cli::run_experiment(cfg, log);
}

}  // namespace

TEST(CmdCapacity, TwoRowsNotRepresentable) {
  const auto out = scratch("cap_w1");
  EXPECT_EQ(run("capacity", {{"w", 1}, {"n_max", 3}}, out), cli::kOk);
  EXPECT_EQ(slurp(out / "capacity.csv"),
            "w,n,subsets_tested,representable,witness_weights,witness_bias,elapsed_s\n"
            "1,2,2,false,,,\n"
            "1,3,3,false,,,\n");
  const auto rows = read_json(out / "capacity.json");
  ASSERT_EQ(rows.size(), 2U);
  EXPECT_FALSE(rows[1]["representable"].get<bool>());
  const auto manifest = read_json(out / "manifest.json");
  EXPECT_EQ(manifest["command"], "capacity");
  EXPECT_EQ(manifest["rng"], "mt19937_64");
}

TEST(CmdCapacity, PreconditionIsExitOne) {
  EXPECT_EQ(run("capacity", {{"w", 3}, {"n_max", 3}}, scratch("cap_bad")), cli::kConfigError);
  EXPECT_EQ(run("capacity", {{"w", 1}, {"n_max", 21}}, scratch("cap_big")), cli::kConfigError);
  EXPECT_EQ(run("capacity", {{"w", 1}, {"width", 2}}, scratch("cap_key")), cli::kConfigError);
}

TEST(CmdCapacity, BudgetExhaustionIsNonzero) {
  EXPECT_EQ(run("capacity", {{"w", 2}, {"n_max", 4}, {"budget", 1}}, scratch("cap_budget")),
            cli::kConfigError);
}

TEST(CmdCapacity, RerunIsByteIdentical) {
  const auto a = scratch("cap_a");
  const auto b = scratch("cap_b");
  ASSERT_EQ(run("capacity", {{"w", 2}, {"n_max", 4}}, a), cli::kOk);
  ASSERT_EQ(run("capacity", {{"w", 2}, {"n_max", 4}}, b), cli::kOk);
  for (const char* f : {"capacity.csv", "capacity.json", "manifest.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(CmdCompile, AndNetHasNoCollision) {
  const auto out = scratch("and");
  ASSERT_EQ(run("compile", {{"weights", "and_net.json"}}, out), cli::kOk);
  const auto v = read_json(out / "verification.json");
  EXPECT_TRUE(v["verified"].get<bool>());
  EXPECT_TRUE(v["indistinguishable_pair"].is_null());
  const auto circuit = read_json(out / "circuit.json");
  // Output class y = 1 of the AND net.
  EXPECT_EQ(logicdepth::predicate_from_json(circuit["output_tables"][1]["predicate"]).bit_string(), "0001");
}

TEST(CmdCompile, OrNetCollides) {
  const auto out = scratch("or");
  ASSERT_EQ(run("compile", {{"weights", "or_net.json"}}, out), cli::kOk);
  const auto v = read_json(out / "verification.json");
  EXPECT_TRUE(v["verified"].get<bool>());
  EXPECT_EQ(v["indistinguishable_pair"], (json{{"x", 1}, {"y", 2}}));
}

TEST(CmdCompile, MalformedAndOverflowAreExitOne) {
  EXPECT_EQ(run("compile", {{"weights", "malformed.json"}}, scratch("bad")), cli::kConfigError);
  EXPECT_EQ(run("compile", {{"weights", "overflow_net.json"}}, scratch("ovf")), cli::kConfigError);
  EXPECT_EQ(run("compile", {{"weights", "missing.json"}}, scratch("miss")), cli::kConfigError);
  EXPECT_EQ(run("compile", json::object(), scratch("none")), cli::kConfigError);
}

TEST(CmdCompile, SeededSweepIsReproducible) {
  const auto a = scratch("sweep_a");
  const auto b = scratch("sweep_b");
  const auto c = scratch("sweep_c");
  ASSERT_EQ(run("compile", {{"random", 10}}, a, 9), cli::kOk);
  ASSERT_EQ(run("compile", {{"random", 10}}, b, 9), cli::kOk);
  ASSERT_EQ(run("compile", {{"random", 10}}, c, 10), cli::kOk);
  EXPECT_EQ(slurp(a / "sweep.csv"), slurp(b / "sweep.csv"));
  EXPECT_NE(slurp(a / "sweep.csv"), slurp(c / "sweep.csv"));
  EXPECT_EQ(read_json(a / "manifest.json")["seed"], 9);
}

TEST(CmdPipeline, IdentityIsConstant) {
  const auto out = scratch("pipe_id");
  ASSERT_EQ(run("pipeline", {{"config", "identity_pipeline.json"}, {"steps", 5}, {"prompt", {"b"}}}, out),
            cli::kOk);
  EXPECT_EQ(slurp(out / "summary.csv"),
            "step,input_token,selected_token,residual\n"
            "0,b,b,0\n1,b,b,0\n2,b,b,0\n3,b,b,0\n4,b,b,0\n");
  std::ifstream in(out / "trace.jsonl");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(json::parse(line)["hallucination_residual"], 0.0);
    ++lines;
  }
  EXPECT_EQ(lines, 5);
  EXPECT_TRUE(read_json(out / "null_space.json")["aliased_pairs"].empty());
}

TEST(CmdPipeline, RankDeficientListsAliases) {
  const auto out = scratch("pipe_rd");
  ASSERT_EQ(run("pipeline", {{"config", "rank_deficient_pipeline.json"}, {"steps", 3}}, out), cli::kOk);
  const auto ns = read_json(out / "null_space.json");
  EXPECT_EQ(ns["rank"], 2);
  ASSERT_EQ(ns["aliased_pairs"].size(), 1U);
  EXPECT_EQ(ns["aliased_pairs"][0]["a"], 0);
  EXPECT_EQ(ns["aliased_pairs"][0]["b"], 2);
}

TEST(CmdPipeline, DimensionMismatchWritesNothing) {
  const auto out = scratch("pipe_bad");
  EXPECT_EQ(run("pipeline", {{"config", "mismatched_pipeline.json"}}, out), cli::kConfigError);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("pipeline", {{"config", "identity_pipeline.json"}, {"prompt", {"zz"}}}, scratch("pipe_tok")),
            cli::kConfigError);
}

TEST(CmdPipeline, RerunIsByteIdentical) {
  const auto a = scratch("pipe_a");
  const auto b = scratch("pipe_b");
  const json p{{"config", "rank_deficient_pipeline.json"}, {"steps", 7}, {"prompt", {"sky"}}};
  ASSERT_EQ(run("pipeline", p, a), cli::kOk);
  ASSERT_EQ(run("pipeline", p, b), cli::kOk);
  for (const char* f : {"trace.jsonl", "summary.csv", "null_space.json", "manifest.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(CmdMetaphor, XorRowAndAliasClasses) {
  const auto out = scratch("meta");
  ASSERT_EQ(run("metaphor", {{"targets", "metaphor_targets.json"}, {"basis", "metaphor_basis.json"}}, out),
            cli::kOk);
  EXPECT_EQ(slurp(out / "metaphor.csv"),
            "target,basis_size,residual_sse,rms_score,in_span,depth_target,depth_basis_max\n"
            "xor,2,1,0.5,false,0,0\n"
            "not_x1,2,0,0,true,0,0\n"
            "xor_again,2,1,0.5,false,0,0\n"
            "xnor,2,1,0.5,false,0,0\n");
  const auto classes = read_json(out / "alias_classes.json");
  ASSERT_EQ(classes.size(), 2U);
  EXPECT_EQ(classes[0], (json{"xor", "xor_again", "xnor"}));
}

TEST(CmdMetaphor, UniverseMismatchIsConfigError) {
  EXPECT_EQ(run("metaphor", {{"targets", "metaphor_targets.json"}, {"basis", "metaphor_basis_n3.json"}},
                scratch("meta_bad")),
            cli::kConfigError);
}

TEST(ExperimentConfig, ParsesAndRejectsUnknownKeys) {
  const auto cfg = cli::load_experiment_config(kFixtures / "capacity_experiment.json");
  EXPECT_EQ(cfg.command, "capacity");
  EXPECT_EQ(cfg.seed, 1U);
  EXPECT_EQ(cfg.parameters["n_max"], 3);
  EXPECT_THROW(cli::experiment_config_from_json(json{{"command", "capacity"}, {"verbose", true}}, "."),
               logicdepth::ConfigError);
  EXPECT_THROW(cli::experiment_config_from_json(json{{"parameters", json::object()}}, "."),
               logicdepth::ConfigError);
  EXPECT_EQ(run("unknown", json::object(), scratch("unk")), cli::kConfigError);
}
