#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicdepth/net_compiler.hpp"
#include "logicdepth/predicate.hpp"

namespace logicdepth {

inline constexpr double kSeparabilityEpsilon = 1e-6;
inline constexpr std::uint64_t kDefaultSubsetBudget = 1'000'000;

/// Linear threshold unit over a set of feature predicates.
///
/// The unit fires on x iff weights . f(x) + bias > 0, with f(x) the 0/1 feature
/// values. Returned witnesses are scaled so the smallest nonzero |weight| is 1
/// (or |bias| = 1 when all weights vanish) and separate with margin >= epsilon.
struct SeparabilityWitness {
  std::vector<std::string> feature_ids;
  std::vector<double> weights;
  double bias = 0.0;
};

struct SeparabilityResult {
  bool feasible = false;
  std::optional<SeparabilityWitness> witness;
};

/// Decided exactly (rational simplex), not by a floating-point heuristic.
SeparabilityResult is_linearly_separable(const Predicate& p, const PredicateFamily& features,
                                         double epsilon = kSeparabilityEpsilon);

/// True iff `witness` reproduces `p` on every input with margin >= epsilon.
bool verify_witness(const Predicate& p, const PredicateFamily& features,
                    const SeparabilityWitness& witness, double epsilon = kSeparabilityEpsilon);

struct CapacityOptions {
  std::uint64_t subset_budget = kDefaultSubsetBudget;
  double epsilon = kSeparabilityEpsilon;
};

struct CapacityReport {
  int w = 0;
  int n = 0;
  std::uint64_t subsets_tested = 0;
  bool representable = false;
  std::optional<SeparabilityWitness> witness;
  double elapsed_s = 0.0;
};

/// Can a single threshold unit reading at most `w` members of `basis` compute p?
///
/// Any smaller subset is contained in a subset of size min(w, |basis|) (extra
/// features take weight 0), so only those subsets are searched, in
/// lexicographic order of basis position; the first witness wins.
CapacityReport representable_by_single_layer(const Predicate& p, int w,
                                             const PredicateFamily& basis,
                                             const CapacityOptions& opts = {});

/// Checks at_least_k_true(w + 1, n) against width-w atom subsets.
CapacityReport exhaust_capacity(int w, int n, const CapacityOptions& opts = {});

struct IndistinguishablePair {
  std::uint32_t x;
  std::uint32_t y;
};

/// First (in input order) pair of distinct inputs whose full node-bit traces
/// agree, or nullopt when the trace map is injective.
std::optional<IndistinguishablePair> find_indistinguishable_pair(const PredicateCircuit& circuit);

// CSV/JSON field names: w, n, subsets_tested, representable, witness_weights,
// witness_bias, elapsed_s. Weights in a CSV cell are ';'-separated. When
// `with_timing` is false elapsed_s is left empty (CSV) / null (JSON) so the
// record is reproducible byte for byte.

std::string capacity_csv_header();
std::string to_csv_row(const CapacityReport& r, bool with_timing);
nlohmann::json to_json(const CapacityReport& r, bool with_timing);

}  // namespace logicdepth
