// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "logicdepth/approximation.hpp"
#include "logicdepth/expressiveness.hpp"
#include "logicdepth/linear_ops.hpp"
#include "logicdepth/net_compiler.hpp"
#include "logicdepth/pipeline.hpp"
#include "logicdepth/random.hpp"
#include "oracles.hpp"

using namespace logicdepth;
namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const fs::path kFixtures = LOGICDEPTH_FIXTURE_DIR;
const fs::path kScratch = fs::path(LOGICDEPTH_SCRATCH_DIR) / "acceptance";

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::uint64_t choose(int n, int k) {
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

int oracle_activation(Activation a) {
  switch (a) {
    case Activation::sign: return 0;
    case Activation::clipped_relu: return 1;
    case Activation::identity: return 2;
  }
  return -1;
}

std::vector<std::int64_t> oracle_values(const QuantizedNet& net, std::uint32_t x) {
  std::vector<std::vector<std::vector<std::int64_t>>> w;
  std::vector<std::vector<std::int64_t>> b;
  for (const auto& l : net.layers()) {
    w.push_back(l.weights);
    b.push_back(l.bias);
  }
  return oracle::forward_trace(w, b, oracle_activation(net.activation()), net.bit_width(), net.input_bits(), x);
}

std::vector<bool> oracle_trace(const QuantizedNet& net, std::uint32_t x) {
  std::vector<bool> bits;
  for (auto v : oracle_values(net, x)) {
    for (int i = 0; i < net.bit_width(); ++i) bits.push_back(((static_cast<std::uint64_t>(v) >> i) & 1U) != 0);
  }
  return bits;
}

MatrixXd gaussian(Rng& rng, Eigen::Index r, Eigen::Index c) {
  MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rng.normal();
  }
  return m;
}

// 1. Exhaustive capacity rows through the command runner.
Outcome capacity_bound() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  for (int w = 1; w <= 4; ++w) {
    cli::CapacityParams p;
    p.w = w;
    p.n_max = w + 2;
    const auto out = kScratch / ("capacity_w" + std::to_string(w));
    std::ostringstream log;
    const int code = cli::cmd_capacity(p, out, 0, log);
    if (code != cli::kOk) o.fail("w=" + std::to_string(w) + " exit code " + std::to_string(code));
    const auto lines = split_lines(slurp(out / "capacity.csv"));
    if (lines.size() != 3) {
      o.fail("w=" + std::to_string(w) + " expected 2 rows");
      continue;
    }
    for (int n = w + 1; n <= w + 2; ++n) {
      const std::string expected = std::to_string(w) + "," + std::to_string(n) + "," +
                                   std::to_string(choose(n, w)) + ",false,,,";
      if (lines[static_cast<std::size_t>(n - w)] != expected) {
        o.fail("row '" + lines[static_cast<std::size_t>(n - w)] + "' != '" + expected + "'");
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 120.0) o.fail("runtime " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "8 rows not representable, all subsets tested, " + std::to_string(elapsed) + " s";
  return o;
}

// 2. Full-width positive control, witnesses re-checked by direct summation.
Outcome positive_control() {
  Outcome o;
  int cases = 0;
  for (int n = 1; n <= 6; ++n) {
    const Universe u(n);
    for (int k = 0; k <= n; ++k) {
      const auto target = at_least_k_true(k, u);
      const auto r = representable_by_single_layer(target, n, atoms(u));
      ++cases;
      if (!r.representable || !r.witness) {
        o.fail("at_least_" + std::to_string(k) + "_of_" + std::to_string(n) + " not representable");
        continue;
      }
      for (std::size_t x = 0; x < u.size(); ++x) {
        double v = r.witness->bias;
        for (std::size_t j = 0; j < r.witness->weights.size(); ++j) {
          const int atom_index = std::stoi(r.witness->feature_ids[j].substr(1)) - 1;
          if (oracle::bit(x, atom_index)) v += r.witness->weights[j];
        }
        if ((v > 0) != (oracle::popcount(x) >= k)) {
          o.fail("witness for k=" + std::to_string(k) + ", n=" + std::to_string(n) + " wrong at input " +
                 std::to_string(x));
          break;
        }
      }
    }
  }
  if (o.pass) o.detail = std::to_string(cases) + " targets representable, witnesses re-verified";
  return o;
}

// 3. Seeded random nets, library verification plus an independent forward pass.
Outcome compilation_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(20240601);
  for (int i = 0; i < 100; ++i) {
    const auto act = i % 2 ? Activation::sign : Activation::clipped_relu;
    const auto net = random_net(rng, RandomNetShape{3, 4, 8, 4, act});
    const auto circuit = compile_net(net);
    if (!verify_compilation(circuit).verified) o.fail("net " + std::to_string(i) + " failed verification");
    for (std::uint32_t x = 0; x < 256; ++x) {
      if (circuit.trace(x) != oracle_trace(net, x)) {
        o.fail("net " + std::to_string(i) + " differs from oracle at input " + std::to_string(x));
        break;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  if (elapsed >= 60.0) o.fail("runtime " + std::to_string(elapsed) + " s");
  if (o.pass) o.detail = "100/100 nets bit-exact, " + std::to_string(elapsed) + " s";
  return o;
}

// 4. Nets whose trace is narrower than their input must collide.
Outcome indistinguishability() {
  Outcome o;
  Rng rng(77001);
  int checked = 0;
  while (checked < 100) {
    const int input_bits = static_cast<int>(rng.uniform_int(5, 12));
    const int bit_width = static_cast<int>(rng.uniform_int(2, 4));
    const int budget = (input_bits - 1) / bit_width;  // nodes allowed while trace < input
    if (budget < 1) continue;
    const int depth = static_cast<int>(rng.uniform_int(1, std::min(3, budget)));
    std::vector<int> widths;
    int left = budget - depth;  // each layer takes at least one node
    for (int d = 0; d < depth; ++d) {
      const int extra = static_cast<int>(rng.uniform_int(0, std::min(3, left)));
      widths.push_back(1 + extra);
      left -= extra;
    }
    const auto act = rng.coin() ? Activation::sign : Activation::clipped_relu;
    const auto net = random_net(rng, input_bits, bit_width, act, widths);
    const auto circuit = compile_net(net);
    if (circuit.trace_bits() >= input_bits) {
      o.fail("generator produced trace_bits >= input_bits");
      break;
    }
    ++checked;
    const auto pair = find_indistinguishable_pair(circuit);
    if (!pair) {
      o.fail("case " + std::to_string(checked) + ": no collision reported");
      continue;
    }
    if (pair->x == pair->y || oracle_trace(net, pair->x) != oracle_trace(net, pair->y)) {
      o.fail("case " + std::to_string(checked) + ": reported pair does not collide");
    }
  }
  if (o.pass) o.detail = "100/100 narrow-trace nets produced verified collisions";
  return o;
}

// 5. Four Penrose identities and rank-nullity.
Outcome moore_penrose() {
  Outcome o;
  Rng rng(5150);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto r = static_cast<Eigen::Index>(rng.uniform_int(1, 20));
    const auto c = static_cast<Eigen::Index>(rng.uniform_int(1, 30));
    MatrixXd a;
    std::optional<Eigen::Index> built_rank;
    if (i % 2 == 1) {
      const auto k = static_cast<Eigen::Index>(rng.uniform_int(1, std::min<std::int64_t>(r, c)));
      a = gaussian(rng, r, k) * gaussian(rng, k, c);
      built_rank = k;
    } else {
      a = gaussian(rng, r, c);
    }
    const LinearOperator op(a);
    const MatrixXd p = pseudoinverse(op).entries();
    const auto rel = [](const MatrixXd& diff, const MatrixXd& ref) {
      return diff.norm() / std::max(ref.norm(), 1e-300);
    };
    const MatrixXd ap = a * p;
    const MatrixXd pa = p * a;
    const double e = std::max({rel(ap * a - a, a), rel(pa * p - p, p), rel(ap.transpose() - ap, ap),
                               rel(pa.transpose() - pa, pa)});
    worst = std::max(worst, e);
    if (e > 1e-9) o.fail("matrix " + std::to_string(i) + " identity error " + std::to_string(e));
    const int rk = rank(op);
    if (rk + null_space_basis(op).dim() != c) o.fail("matrix " + std::to_string(i) + " rank + nullity != cols");
    if (built_rank && rk != *built_rank) o.fail("matrix " + std::to_string(i) + " rank differs from construction");
    if (rk != oracle::lu_rank(a)) o.fail("matrix " + std::to_string(i) + " rank differs from LU oracle");
  }
  if (o.pass) {
    std::ostringstream s;
    s << "100 matrices (50 rank-deficient), worst relative error " << worst;
    o.detail = s.str();
  }
  return o;
}

// 6. Duplicated columns of L+ alias; full column rank does not.
Outcome aliasing() {
  Outcome o;
  Rng rng(6060);
  for (int i = 0; i < 50; ++i) {
    const auto p = static_cast<Eigen::Index>(rng.uniform_int(2, 8));
    const auto v = static_cast<Eigen::Index>(rng.uniform_int(3, 10));
    MatrixXd lplus = gaussian(rng, p, v);
    const auto src = static_cast<Eigen::Index>(rng.uniform_int(0, v - 1));
    auto dst = static_cast<Eigen::Index>(rng.uniform_int(0, v - 2));
    if (dst >= src) ++dst;
    lplus.col(dst) = lplus.col(src);
    std::vector<std::string> names;
    for (Eigen::Index t = 0; t < v; ++t) names.push_back("t" + std::to_string(t));
    const PipelineConfig cfg(TokenTable(names), LinearOperator(lplus), LinearOperator(gaussian(rng, p, p)),
                             LinearOperator(gaussian(rng, v, p)));
    const auto report = null_space_report(cfg);
    if (report.aliased.empty()) {
      o.fail("rank-deficient config " + std::to_string(i) + " reported no aliases");
      continue;
    }
    bool found = false;
    for (const auto& a : report.aliased) {
      const double d = (lplus.col(static_cast<Eigen::Index>(a.a)) - lplus.col(static_cast<Eigen::Index>(a.b))).norm();
      if (d > 1e-9) o.fail("config " + std::to_string(i) + " alias with projected difference " + std::to_string(d));
      const auto lo = std::min(src, dst);
      const auto hi = std::max(src, dst);
      if (a.a == static_cast<std::size_t>(lo) && a.b == static_cast<std::size_t>(hi)) found = true;
    }
    if (!found) o.fail("config " + std::to_string(i) + " missed the constructed pair");
  }
  for (int i = 0; i < 50; ++i) {
    const auto v = static_cast<Eigen::Index>(rng.uniform_int(2, 8));
    const auto p = static_cast<Eigen::Index>(rng.uniform_int(v, 10));
    std::vector<std::string> names;
    for (Eigen::Index t = 0; t < v; ++t) names.push_back("t" + std::to_string(t));
    const PipelineConfig cfg(TokenTable(names), LinearOperator(gaussian(rng, p, v)),
                             LinearOperator(gaussian(rng, p, p)), LinearOperator(gaussian(rng, v, p)));
    const auto report = null_space_report(cfg);
    if (!report.aliased.empty()) o.fail("full-rank config " + std::to_string(i) + " reported aliases");
    if (report.rank != v) o.fail("full-rank config " + std::to_string(i) + " has rank " + std::to_string(report.rank));
  }
  if (o.pass) o.detail = "50/50 rank-deficient configs alias, 50/50 full-rank configs clean";
  return o;
}

Eigen::MatrixXd design_matrix(const PredicateFamily& basis, const ApproxOptions& opts) {
  const auto rows = static_cast<Eigen::Index>(basis[0].size());
  const auto cols = static_cast<Eigen::Index>(basis.size()) + (opts.affine ? 1 : 0);
  const double off = opts.embedding == Embedding::zero_one ? 0.0 : -1.0;
  MatrixXd x(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < basis.size(); ++j) {
      x(r, static_cast<Eigen::Index>(j)) = basis[j][static_cast<std::size_t>(r)] ? 1.0 : off;
    }
    if (opts.affine) x(r, cols - 1) = 1.0;
  }
  return x;
}

VectorXd target_column(const Predicate& p, Embedding e) {
  const double off = e == Embedding::zero_one ? 0.0 : -1.0;
  VectorXd y(static_cast<Eigen::Index>(p.size()));
  for (std::size_t x = 0; x < p.size(); ++x) y(static_cast<Eigen::Index>(x)) = p[x] ? 1.0 : off;
  return y;
}

// 7. XOR residual, and residual 0 exactly when the target lies in the span.
Outcome metaphor_residual() {
  Outcome o;
  const Universe u2(2);
  const auto xo = combine(BoolOp::lxor, {atom(1, u2), atom(2, u2)});
  ApproxOptions affine;
  affine.affine = true;
  const auto r = approximate(xo, atoms(u2), affine);
  const double oracle_sse = oracle::qr_residual_sse(design_matrix(atoms(u2), affine), target_column(xo, affine.embedding));
  if (std::abs(r.residual_sse - 1.0) > 1e-9) o.fail("xor residual_sse " + std::to_string(r.residual_sse));
  if (std::abs(r.rms_score - 0.5) > 1e-9) o.fail("xor rms " + std::to_string(r.rms_score));
  if (std::abs(oracle_sse - r.residual_sse) > 1e-9) o.fail("xor residual disagrees with oracle");

  Rng rng(7007);
  int in_span = 0;
  for (int i = 0; i < 50; ++i) {
    const int n = static_cast<int>(rng.uniform_int(2, 5));
    const Universe u(n);
    PredicateFamily basis("basis");
    const auto m = rng.uniform_int(1, n + 1);
    for (std::int64_t j = 0; j < m; ++j) {
      basis.add(Predicate::from_function(u, [&](std::size_t) { return rng.coin(); }, 0, "b" + std::to_string(j)));
    }
    ApproxOptions opts;
    opts.affine = rng.coin();
    opts.embedding = rng.coin() ? Embedding::zero_one : Embedding::plus_minus_one;
    Predicate target = Predicate::from_function(u, [&](std::size_t) { return rng.coin(); }, 0, "target");
    if (i % 2 == 0) {
      // Draw from the span: a member, or its negation when that is reachable.
      const auto& member = basis[static_cast<std::size_t>(rng.uniform_int(0, m - 1))];
      const bool negate = rng.coin() && (opts.affine || opts.embedding == Embedding::plus_minus_one);
      target = (negate ? combine(BoolOp::lnot, {member}) : member).with_label("target");
    }
    const auto rep = approximate(target, basis, opts);
    const MatrixXd x = design_matrix(basis, opts);
    MatrixXd xy(x.rows(), x.cols() + 1);
    xy << x, target_column(target, opts.embedding);
    const bool oracle_in_span = oracle::lu_rank(xy) == oracle::lu_rank(x);
    if ((rep.residual_sse == 0.0) != oracle_in_span || rep.in_span != oracle_in_span) {
      o.fail("sweep case " + std::to_string(i) + ": residual " + std::to_string(rep.residual_sse) +
             " vs oracle in-span " + (oracle_in_span ? "true" : "false"));
    }
    in_span += oracle_in_span ? 1 : 0;
  }
  if (o.pass) {
    o.detail = "xor sse 1, rms 0.5; sweep 50/50 agree (" + std::to_string(in_span) + " in span)";
  }
  return o;
}

bool same_outputs(const fs::path& a, const fs::path& b, const std::vector<std::string>& files) {
  for (const auto& f : files) {
    if (!fs::exists(a / f) || slurp(a / f) != slurp(b / f)) return false;
  }
  return true;
}

// 8. Identity soundness over 100 steps, byte-identical reruns.
Outcome pipeline_determinism() {
  Outcome o;
  for (std::size_t v : {1, 3, 8}) {
    const auto cfg = PipelineConfig::identity(v);
    for (std::size_t seed_token = 0; seed_token < v; ++seed_token) {
      const auto traces = run(cfg, {seed_token}, 100);
      for (const auto& t : traces) {
        if (t.selected_token != seed_token || t.hallucination_residual != 0.0) {
          o.fail("identity V=" + std::to_string(v) + " drifted from token " + std::to_string(seed_token));
          break;
        }
      }
    }
  }

  std::vector<fs::path> configs{kFixtures / "identity_pipeline.json", kFixtures / "rank_deficient_pipeline.json"};
  Rng rng(8008);
  for (int i = 0; i < 5; ++i) {
    const auto p = static_cast<Eigen::Index>(rng.uniform_int(2, 6));
    const auto v = static_cast<Eigen::Index>(rng.uniform_int(2, 8));
    std::vector<std::string> names;
    for (Eigen::Index t = 0; t < v; ++t) names.push_back("w" + std::to_string(t));
    const PipelineConfig cfg(TokenTable(names), LinearOperator(gaussian(rng, p, v)),
                             LinearOperator(gaussian(rng, p, p)), LinearOperator(gaussian(rng, v, p)));
    const auto path = kScratch / ("random_pipeline_" + std::to_string(i) + ".json");
    fs::create_directories(kScratch);
    std::ofstream(path) << to_json(cfg).dump(2) << "\n";
    configs.push_back(path);
  }
  const std::vector<std::string> files{"trace.jsonl", "summary.csv", "null_space.json", "manifest.json"};
  for (std::size_t i = 0; i < configs.size(); ++i) {
    cli::PipelineParams params;
    params.config = configs[i];
    params.steps = 100;
    const auto a = kScratch / ("pipeline_" + std::to_string(i) + "_a");
    const auto b = kScratch / ("pipeline_" + std::to_string(i) + "_b");
    std::ostringstream log;
    if (cli::cmd_pipeline(params, a, 0, log) != cli::kOk || cli::cmd_pipeline(params, b, 0, log) != cli::kOk) {
      o.fail("pipeline run failed for " + configs[i].filename().string());
      continue;
    }
    if (!same_outputs(a, b, files)) o.fail("rerun differs for " + configs[i].filename().string());
    if (i == 0) {
      for (const auto& line : split_lines(slurp(a / "summary.csv"))) {
        if (line.rfind("step", 0) == 0) continue;
        if (line.substr(line.find(',')) != ",a,a,0") {
          o.fail("identity fixture summary line '" + line + "'");
          break;
        }
      }
    }
  }
  if (o.pass) o.detail = "identity fixed for 100 steps, " + std::to_string(configs.size()) + " configs rerun byte-identical";
  return o;
}

}  // namespace

int main() {
  fs::remove_all(kScratch);
  fs::create_directories(kScratch);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"capacity bound", capacity_bound},
      {"positive control", positive_control},
      {"compilation equivalence", compilation_equivalence},
      {"indistinguishability", indistinguishability},
      {"Moore-Penrose identities", moore_penrose},
      {"aliasing", aliasing},
      {"metaphor residual", metaphor_residual},
      {"pipeline determinism", pipeline_determinism},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
