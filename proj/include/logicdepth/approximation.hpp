#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicdepth/predicate.hpp"

namespace logicdepth {

enum class Embedding {
  zero_one,        ///< false -> 0, true -> 1
  plus_minus_one,  ///< false -> -1, true -> +1
};

std::string to_string(Embedding e);
Embedding embedding_from_string(const std::string& s);

struct ApproxOptions {
  bool affine = false;  ///< add an all-ones column (the intercept)
  Embedding embedding = Embedding::zero_one;
  /// Residuals at or below this SSE count as "in span" and are reported as 0.
  double span_tol = 1e-9;
};

/// Least-squares fit of a real vector over the 2^n inputs by basis columns.
struct LeastSquaresFit {
  std::vector<double> alpha;        ///< minimum-norm coefficients, one per basis member
  std::optional<double> intercept;  ///< present iff affine
  std::vector<double> fitted;       ///< sum_i alpha_i n_i (+ intercept) per input
  double residual_sse = 0.0;
};

LeastSquaresFit fit_least_squares(std::span<const double> target, const PredicateFamily& basis,
                                  const ApproxOptions& opts = {});

/// Basis member as a column of embedded truth values.
std::vector<double> embed(const Predicate& p, Embedding e);

struct ApproxReport {
  std::string target_id;
  std::vector<std::string> basis_ids;
  std::vector<double> alpha;
  std::optional<double> intercept;
  double residual_sse = 0.0;
  double rms_score = 0.0;
  bool in_span = false;
  int depth_target = 0;
  int depth_basis_max = 0;
  bool affine = false;
  Embedding embedding = Embedding::zero_one;
};

/// p ~ sum_i alpha_i n_i over all inputs.
ApproxReport approximate(const Predicate& p, const PredicateFamily& basis,
                         const ApproxOptions& opts = {});

/// Root-mean-square residual of `approximate` over the input space.
double hallucination_score(const Predicate& p, const PredicateFamily& basis,
                           const ApproxOptions& opts = {});

/// Groups candidate ids whose projections onto span(basis) agree within
/// `tol` (max abs difference). Classes and their members keep candidate order.
std::vector<std::vector<std::string>> alias_classes(const PredicateFamily& basis,
                                                    const PredicateFamily& candidates,
                                                    const ApproxOptions& opts = {},
                                                    double tol = 1e-9);

// CSV: target,basis_size,residual_sse,rms_score,in_span,depth_target,depth_basis_max
std::string approx_csv_header();
std::string to_csv_row(const ApproxReport& r);
nlohmann::json to_json(const ApproxReport& r);

}  // namespace logicdepth
