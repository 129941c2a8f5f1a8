#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "logicdepth/linear_ops.hpp"

namespace logicdepth {

/// Bijection between surface symbols and token ids 0..V-1.
class TokenTable {
 public:
  explicit TokenTable(std::vector<std::string> symbols);

  std::size_t size() const noexcept { return symbols_.size(); }
  std::size_t tokenize(std::string_view symbol) const;
  const std::string& detokenize(std::size_t id) const;
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, std::size_t> ids_;
};

/// Operators of one generation step (one-hot -> L+ -> M -> S -> argmax):
///   L+ : P x V  token one-hot -> predicate estimate
///   M  : P x P  invertible
///   S  : V x P  activation -> selection scores
///   L  : P x V  selected one-hot -> predicate reconstruction
/// All shapes and the invertibility of M are checked on construction.
class PipelineConfig {
 public:
  /// `l` defaults to pseudoinverse(lplus) transposed.
  PipelineConfig(TokenTable tokens, LinearOperator lplus, LinearOperator m, LinearOperator s,
                 std::optional<LinearOperator> l = std::nullopt);

  /// Every operator the identity on a vocabulary of n symbols "t0".."t{n-1}".
  static PipelineConfig identity(std::size_t n);

  std::size_t vocab() const noexcept { return tokens_.size(); }
  std::size_t pred_dim() const noexcept { return static_cast<std::size_t>(lplus_.rows()); }
  const TokenTable& tokens() const noexcept { return tokens_; }
  const LinearOperator& lplus() const noexcept { return lplus_; }
  const LinearOperator& m() const noexcept { return m_; }
  const LinearOperator& s() const noexcept { return s_; }
  const LinearOperator& l() const noexcept { return l_; }

 private:
  TokenTable tokens_;
  LinearOperator lplus_;
  LinearOperator m_;
  LinearOperator s_;
  LinearOperator l_;
};

std::size_t tokenize(const PipelineConfig& cfg, std::string_view symbol);
const std::string& detokenize(const PipelineConfig& cfg, std::size_t id);

struct StepTrace {
  std::size_t input_token = 0;
  Eigen::VectorXd predicate_estimate;
  Eigen::VectorXd activation;
  Eigen::VectorXd scores;
  std::size_t selected_token = 0;
  Eigen::VectorXd reconstruction;
  double hallucination_residual = 0.0;
};

/// One pass of the chain on the most recent token of `history`; earlier
/// tokens do not enter the computation. Selection is argmax of the scores,
/// lowest id on ties.
StepTrace step(const PipelineConfig& cfg, std::span<const std::size_t> history);

/// Iterates step, appending each selected token to the history.
std::vector<StepTrace> run(const PipelineConfig& cfg, std::vector<std::size_t> seed_history,
                           int steps);

struct AliasedTokens {
  std::size_t a;
  std::size_t b;
  double distance;  ///< ||L+ e_a - L+ e_b||
};

struct NullSpaceReport {
  int rank = 0;
  NullSpaceBasis null_space;
  std::vector<AliasedTokens> aliased;
};

/// Rank and kernel of L+, plus every token pair with equal projections.
NullSpaceReport null_space_report(const PipelineConfig& cfg, double tol = kAliasTol);

// Config file:
//   {"tokens": ["a", ...], "Lplus": M, "M": M, "S": M, "L": M (optional)}
// with each M in the matrix JSON record format.

PipelineConfig pipeline_config_from_json(const nlohmann::json& j);
PipelineConfig load_pipeline_config(const std::string& path);
nlohmann::json to_json(const PipelineConfig& cfg);

nlohmann::json to_json(const StepTrace& t, std::size_t step_index);
nlohmann::json to_json(const NullSpaceReport& r);

}  // namespace logicdepth
