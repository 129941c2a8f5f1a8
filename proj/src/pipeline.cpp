#include "logicdepth/pipeline.hpp"

#include <fstream>

#include "logicdepth/errors.hpp"

namespace logicdepth {

namespace {

std::string shape(const LinearOperator& op) {
  return std::to_string(op.rows()) + "x" + std::to_string(op.cols());
}

void require_shape(const LinearOperator& op, std::size_t rows, std::size_t cols, const char* name) {
  if (static_cast<std::size_t>(op.rows()) != rows || static_cast<std::size_t>(op.cols()) != cols) {
    throw ConfigError(std::string(name) + " is " + shape(op) + ", expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
}

nlohmann::json vector_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd one_hot(std::size_t n, std::size_t i) {
  return Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i));
}

}  // namespace

TokenTable::TokenTable(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (!ids_.emplace(symbols_[i], i).second) {
      throw ConfigError("token table: symbol '" + symbols_[i] + "' appears twice");
    }
  }
}

std::size_t TokenTable::tokenize(std::string_view symbol) const {
  auto it = ids_.find(std::string(symbol));
  if (it == ids_.end()) throw DomainError("unknown symbol '" + std::string(symbol) + "'");
  return it->second;
}

const std::string& TokenTable::detokenize(std::size_t id) const {
  if (id >= symbols_.size()) {
    throw DomainError("token id " + std::to_string(id) + " outside vocabulary of " +
                      std::to_string(symbols_.size()));
  }
  return symbols_[id];
}

PipelineConfig::PipelineConfig(TokenTable tokens, LinearOperator lplus, LinearOperator m,
                               LinearOperator s, std::optional<LinearOperator> l)
    : tokens_(std::move(tokens)),
      lplus_(std::move(lplus)),
      m_(std::move(m)),
      s_(std::move(s)),
      l_(l ? std::move(*l) : LinearOperator(Eigen::MatrixXd(0, 0))) {
  const std::size_t v = tokens_.size();
  if (v == 0) throw ConfigError("pipeline: empty vocabulary");
  const auto p = static_cast<std::size_t>(lplus_.rows());
  if (p == 0) throw ConfigError("pipeline: Lplus has no rows");
  require_shape(lplus_, p, v, "Lplus");
  require_shape(m_, p, p, "M");
  require_shape(s_, v, p, "S");
  if (!l) l_ = LinearOperator(pseudoinverse(lplus_).entries().transpose(), lplus_.rank_tol());
  require_shape(l_, p, v, "L");
  if (rank(m_) != static_cast<int>(p)) {
    throw ConfigError("pipeline: M is not invertible (rank " + std::to_string(rank(m_)) + " < " +
                      std::to_string(p) + ")");
  }
}

PipelineConfig PipelineConfig::identity(std::size_t n) {
  std::vector<std::string> symbols;
  for (std::size_t i = 0; i < n; ++i) symbols.push_back("t" + std::to_string(i));
  const auto k = static_cast<Eigen::Index>(n);
  return PipelineConfig(TokenTable(std::move(symbols)), LinearOperator::identity(k),
                        LinearOperator::identity(k), LinearOperator::identity(k));
}

std::size_t tokenize(const PipelineConfig& cfg, std::string_view symbol) {
  return cfg.tokens().tokenize(symbol);
}

const std::string& detokenize(const PipelineConfig& cfg, std::size_t id) {
  return cfg.tokens().detokenize(id);
}

StepTrace step(const PipelineConfig& cfg, std::span<const std::size_t> history) {
  if (history.empty()) throw DomainError("step: empty history");
  for (auto id : history) {
    if (id >= cfg.vocab()) {
      throw DomainError("step: token id " + std::to_string(id) + " outside vocabulary of " +
                        std::to_string(cfg.vocab()));
    }
  }
  StepTrace t;
  t.input_token = history.back();
  t.predicate_estimate = cfg.lplus().entries() * one_hot(cfg.vocab(), t.input_token);
  t.activation = cfg.m().entries() * t.predicate_estimate;
  t.scores = cfg.s().entries() * t.activation;

  std::size_t best = 0;
  for (Eigen::Index i = 1; i < t.scores.size(); ++i) {
    if (t.scores(i) > t.scores(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  t.selected_token = best;
  t.reconstruction = cfg.l().entries() * one_hot(cfg.vocab(), best);
  t.hallucination_residual = (t.reconstruction - t.activation).norm();
  return t;
}

std::vector<StepTrace> run(const PipelineConfig& cfg, std::vector<std::size_t> seed_history,
                           int steps) {
  if (steps < 1) throw PreconditionError("run: steps must be >= 1");
  std::vector<StepTrace> traces;
  traces.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    traces.push_back(step(cfg, seed_history));
    seed_history.push_back(traces.back().selected_token);
  }
  return traces;
}

NullSpaceReport null_space_report(const PipelineConfig& cfg, double tol) {
  NullSpaceReport r;
  r.rank = rank(cfg.lplus());
  r.null_space = null_space_basis(cfg.lplus());
  const auto& a = cfg.lplus().entries();
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      const double d = (a.col(i) - a.col(j)).norm();
      if (d <= tol) {
        r.aliased.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), d});
      }
    }
  }
  return r;
}

PipelineConfig pipeline_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("pipeline config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "tokens" && key != "Lplus" && key != "M" && key != "S" && key != "L") {
      throw ConfigError("pipeline config: unknown key '" + key + "'");
    }
  }
  for (const char* key : {"tokens", "Lplus", "M", "S"}) {
    if (!j.contains(key)) throw ConfigError(std::string("pipeline config: missing '") + key + "'");
  }
  if (!j["tokens"].is_array()) throw ConfigError("pipeline config: 'tokens' must be an array");
  std::vector<std::string> symbols;
  for (const auto& s : j["tokens"]) {
    if (!s.is_string()) throw ConfigError("pipeline config: tokens must be strings");
    symbols.push_back(s.get<std::string>());
  }
  auto load = [&](const char* key) {
    try {
      return LinearOperator(matrix_from_json(j[key]));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("pipeline config: ") + key + ": " + e.what());
    }
  };
  std::optional<LinearOperator> l;
  if (j.contains("L")) l = load("L");
  return PipelineConfig(TokenTable(std::move(symbols)), load("Lplus"), load("M"), load("S"),
                        std::move(l));
}

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pipeline config '" + path + "'");
  try {
    return pipeline_config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

nlohmann::json to_json(const PipelineConfig& cfg) {
  return nlohmann::json{{"tokens", cfg.tokens().symbols()},
                        {"Lplus", to_json(cfg.lplus().entries())},
                        {"M", to_json(cfg.m().entries())},
                        {"S", to_json(cfg.s().entries())},
                        {"L", to_json(cfg.l().entries())}};
}

nlohmann::json to_json(const StepTrace& t, std::size_t step_index) {
  return nlohmann::json{{"step", step_index},
                        {"input_token", t.input_token},
                        {"predicate_estimate", vector_json(t.predicate_estimate)},
                        {"activation", vector_json(t.activation)},
                        {"scores", vector_json(t.scores)},
                        {"selected_token", t.selected_token},
                        {"reconstruction", vector_json(t.reconstruction)},
                        {"hallucination_residual", t.hallucination_residual}};
}

nlohmann::json to_json(const NullSpaceReport& r) {
  nlohmann::json basis = nlohmann::json::array();
  for (const auto& v : r.null_space.basis) basis.push_back(vector_json(v));
  nlohmann::json aliased = nlohmann::json::array();
  for (const auto& a : r.aliased) {
    aliased.push_back({{"a", a.a}, {"b", a.b}, {"distance", a.distance}});
  }
  return nlohmann::json{{"rank", r.rank},
                        {"nullity", r.null_space.dim()},
                        {"null_space_basis", std::move(basis)},
                        {"aliased_pairs", std::move(aliased)}};
}

}  // namespace logicdepth
