#include "logicdepth/expressiveness.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "exact_lp.hpp"
#include "logicdepth/errors.hpp"
#include "logicdepth/format.hpp"

namespace logicdepth {

namespace {

using FeatureRefs = std::vector<const Predicate*>;

SeparabilityResult separate(const Predicate& p, const FeatureRefs& feats) {
  const std::size_t m = feats.size();
  const std::size_t key_words = (m + 63) / 64;

  // Inputs with equal feature vectors must agree on p; the LP only needs one
  // row per distinct feature vector.
  std::map<std::vector<std::uint64_t>, bool> labels;
  std::vector<std::uint64_t> key(key_words);
  for (std::size_t x = 0; x < p.size(); ++x) {
    std::fill(key.begin(), key.end(), 0);
    for (std::size_t j = 0; j < m; ++j) {
      if ((*feats[j])[x]) key[j / 64] |= std::uint64_t{1} << (j % 64);
    }
    auto [it, inserted] = labels.emplace(key, p[x]);
    if (!inserted && it->second != p[x]) return {};
  }

  std::vector<std::vector<int>> rows;
  rows.reserve(labels.size());
  for (const auto& [k, label] : labels) {
    const int sign = label ? 1 : -1;
    std::vector<int> row(m + 1);
    for (std::size_t j = 0; j < m; ++j) row[j] = ((k[j / 64] >> (j % 64)) & 1U) ? sign : 0;
    row[m] = sign;
    rows.push_back(std::move(row));
  }

  auto u = detail::min_l1_margin_solution(rows, m + 1);
  if (!u) return {};

  mpq_class scale = 0;
  for (std::size_t j = 0; j < m; ++j) {
    mpq_class a = abs((*u)[j]);
    if (a != 0 && (scale == 0 || a < scale)) scale = a;
  }
  if (scale == 0) scale = abs((*u)[m]);

  SeparabilityWitness w;
  for (std::size_t j = 0; j < m; ++j) {
    w.feature_ids.push_back(feats[j]->label());
    w.weights.push_back(mpq_class((*u)[j] / scale).get_d());
  }
  w.bias = mpq_class((*u)[m] / scale).get_d();
  return {true, std::move(w)};
}

void require_universe(const Predicate& p, const PredicateFamily& fam, const char* what) {
  if (fam.empty()) return;
  if (!(p.universe() == *fam.universe())) {
    throw DomainError(std::string(what) + ": target has " +
                      std::to_string(p.universe().n_atoms()) + " atoms, features have " +
                      std::to_string(fam.universe()->n_atoms()));
  }
}

std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    std::uint64_t prod = 0;
    if (__builtin_mul_overflow(r, n - k + i, &prod)) return std::numeric_limits<std::uint64_t>::max();
    r = prod / i;
  }
  return r;
}

std::string join_weights(const std::vector<double>& ws) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) s += ';';
    s += format_double(ws[i]);
  }
  return s;
}

}  // namespace

SeparabilityResult is_linearly_separable(const Predicate& p, const PredicateFamily& features,
                                         double epsilon) {
  if (features.empty()) throw DomainError("is_linearly_separable: empty feature family");
  require_universe(p, features, "is_linearly_separable");
  FeatureRefs refs;
  for (const auto& f : features) refs.push_back(&f);
  auto result = separate(p, refs);
  if (result.feasible && !verify_witness(p, features, *result.witness, epsilon)) {
    throw std::logic_error("is_linearly_separable: witness failed re-verification");
  }
  return result;
}

bool verify_witness(const Predicate& p, const PredicateFamily& features,
                    const SeparabilityWitness& witness, double epsilon) {
  if (witness.feature_ids.size() != witness.weights.size()) return false;
  FeatureRefs refs;
  for (const auto& id : witness.feature_ids) {
    const Predicate* found = nullptr;
    for (const auto& f : features) {
      if (f.label() == id) found = &f;
    }
    if (!found || !(found->universe() == p.universe())) return false;
    refs.push_back(found);
  }
  if (!std::isfinite(witness.bias)) return false;
  for (std::size_t x = 0; x < p.size(); ++x) {
    double v = witness.bias;
    for (std::size_t j = 0; j < refs.size(); ++j) {
      if ((*refs[j])[x]) v += witness.weights[j];
    }
    if ((p[x] ? v : -v) < epsilon) return false;
  }
  return true;
}

CapacityReport representable_by_single_layer(const Predicate& p, int w,
                                             const PredicateFamily& basis,
                                             const CapacityOptions& opts) {
  if (w < 1) throw PreconditionError("representable_by_single_layer: width must be >= 1");
  if (basis.empty()) throw PreconditionError("representable_by_single_layer: empty basis");
  require_universe(p, basis, "representable_by_single_layer");

  const auto start = std::chrono::steady_clock::now();
  CapacityReport report;
  report.w = w;
  report.n = p.universe().n_atoms();

  const std::size_t b = basis.size();
  const std::size_t s = std::min<std::size_t>(static_cast<std::size_t>(w), b);
  const std::uint64_t total = binomial_saturating(b, s);

  std::vector<std::size_t> idx(s);
  for (std::size_t i = 0; i < s; ++i) idx[i] = i;
  FeatureRefs refs(s);
  for (;;) {
    if (report.subsets_tested == opts.subset_budget) {
      throw BudgetExceeded("subset budget of " + std::to_string(opts.subset_budget) +
                               " exhausted with " +
                               std::to_string(total - report.subsets_tested) +
                               " subsets remaining",
                           report.subsets_tested, total - report.subsets_tested);
    }
    for (std::size_t i = 0; i < s; ++i) refs[i] = &basis[idx[i]];
    ++report.subsets_tested;
    auto r = separate(p, refs);
    if (r.feasible) {
      if (!verify_witness(p, basis, *r.witness, opts.epsilon)) {
        throw std::logic_error("representable_by_single_layer: witness failed re-verification");
      }
      report.representable = true;
      report.witness = std::move(r.witness);
      break;
    }
    // Next combination in lexicographic order.
    std::size_t i = s;
    while (i > 0 && idx[i - 1] == b - s + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t k = i; k < s; ++k) idx[k] = idx[k - 1] + 1;
  }
  report.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

CapacityReport exhaust_capacity(int w, int n, const CapacityOptions& opts) {
  if (w < 1) throw PreconditionError("exhaust_capacity: width must be >= 1");
  if (n < w + 1) {
    throw PreconditionError("exhaust_capacity: need n >= w + 1 (got w=" + std::to_string(w) +
                            ", n=" + std::to_string(n) + ")");
  }
  if (n > kMaxAtoms) {
    throw PreconditionError("exhaust_capacity: n=" + std::to_string(n) + " exceeds cap of " +
                            std::to_string(kMaxAtoms));
  }
  const Universe u(n);
  return representable_by_single_layer(at_least_k_true(w + 1, u), w, atoms(u), opts);
}

std::optional<IndistinguishablePair> find_indistinguishable_pair(const PredicateCircuit& circuit) {
  const Universe u = circuit.universe();
  std::unordered_map<std::vector<bool>, std::uint32_t> seen;
  seen.reserve(u.size());
  for (std::size_t x = 0; x < u.size(); ++x) {
    const auto input = static_cast<std::uint32_t>(x);
    auto [it, inserted] = seen.emplace(circuit.trace(input), input);
    if (!inserted) return IndistinguishablePair{it->second, input};
  }
  return std::nullopt;
}

std::string capacity_csv_header() {
  return "w,n,subsets_tested,representable,witness_weights,witness_bias,elapsed_s";
}

std::string to_csv_row(const CapacityReport& r, bool with_timing) {
  std::string row = std::to_string(r.w) + "," + std::to_string(r.n) + "," +
                    std::to_string(r.subsets_tested) + "," +
                    (r.representable ? "true" : "false") + ",";
  if (r.witness) row += join_weights(r.witness->weights) + "," + format_double(r.witness->bias);
  else row += ",";
  row += ",";
  if (with_timing) row += format_double(r.elapsed_s);
  return row;
}

nlohmann::json to_json(const CapacityReport& r, bool with_timing) {
  nlohmann::json j{{"w", r.w},
                   {"n", r.n},
                   {"subsets_tested", r.subsets_tested},
                   {"representable", r.representable},
                   {"witness_weights", nullptr},
                   {"witness_bias", nullptr},
                   {"elapsed_s", nullptr}};
  if (r.witness) {
    j["witness_weights"] = r.witness->weights;
    j["witness_bias"] = r.witness->bias;
  }
  if (with_timing) j["elapsed_s"] = r.elapsed_s;
  return j;
}

}  // namespace logicdepth
