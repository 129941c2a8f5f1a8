#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace logicdepth {

inline constexpr int kMaxAtoms = 20;

/// The set of all assignments to `n_atoms` atomic propositions.
///
/// Input index `x` encodes an assignment with atom 1 as the least-significant
/// bit, so atom `i` is true on `x` iff `(x >> (i - 1)) & 1`.
class Universe {
 public:
  explicit Universe(int n_atoms);

  int n_atoms() const noexcept { return n_atoms_; }
  std::size_t size() const noexcept { return std::size_t{1} << n_atoms_; }

  friend bool operator==(const Universe&, const Universe&) = default;

 private:
  int n_atoms_;
};

/// Exact truth table over a Universe plus its logic-depth class.
///
/// Tables are packed 64 inputs per word; bits past `universe().size()` are
/// always zero, so word-wise comparison is table comparison.
class Predicate {
 public:
  Predicate(Universe universe, std::vector<std::uint64_t> words, int depth, std::string label);

  static Predicate constant(Universe universe, bool value, std::string label = {});
  static Predicate from_bits(Universe universe, std::string_view bits, int depth = 0,
                             std::string label = {});

  template <typename Fn>
  static Predicate from_function(Universe universe, Fn&& fn, int depth, std::string label) {
    std::vector<std::uint64_t> words(word_count(universe), 0);
    for (std::size_t x = 0; x < universe.size(); ++x) {
      if (fn(x)) words[x / 64] |= std::uint64_t{1} << (x % 64);
    }
    return Predicate(universe, std::move(words), depth, std::move(label));
  }

  const Universe& universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return universe_.size(); }
  int depth() const noexcept { return depth_; }
  const std::string& label() const noexcept { return label_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool at(std::size_t input) const;
  bool operator[](std::size_t input) const noexcept {
    return (words_[input / 64] >> (input % 64)) & 1U;
  }

  std::size_t count() const noexcept;
  bool is_constant() const noexcept;
  bool same_table(const Predicate& other) const noexcept;

  /// Table as '0'/'1' characters, input index 0 first.
  std::string bit_string() const;

  Predicate with_label(std::string label) const;
  Predicate with_depth(int depth) const;
  Predicate flipped(std::size_t input) const;

  friend bool operator==(const Predicate&, const Predicate&) = default;

  static std::size_t word_count(const Universe& u) noexcept { return (u.size() + 63) / 64; }

 private:
  Universe universe_;
  std::vector<std::uint64_t> words_;
  int depth_;
  std::string label_;
};

/// Ordered predicates over one universe with unique member labels.
class PredicateFamily {
 public:
  explicit PredicateFamily(std::string label = {}) : label_(std::move(label)) {}
  PredicateFamily(std::string label, std::vector<Predicate> members);

  void add(Predicate member);

  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  const Predicate& operator[](std::size_t i) const { return members_.at(i); }
  const std::vector<Predicate>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  /// Universe shared by all members; nullopt while the family is empty.
  std::optional<Universe> universe() const;
  int max_depth() const noexcept;
  std::vector<std::string> ids() const;

 private:
  std::string label_;
  std::vector<Predicate> members_;
};

enum class BoolOp { land, lor, lnot, lxor };

/// True exactly where atom `index` (1-based) is 1. Depth 0.
Predicate atom(int index, const Universe& u);

/// x1..xn in order, labelled "x1".."xn".
PredicateFamily atoms(const Universe& u);

/// Pointwise combination; depth is the max operand depth.
Predicate combine(BoolOp kind, std::span<const Predicate> operands);
Predicate combine(BoolOp kind, std::initializer_list<Predicate> operands);

/// "At least k atoms are true". Depth 2.
Predicate at_least_k_true(int k, const Universe& u);

/// "At least k distinct members of fam are true". Depth max member depth + 2.
Predicate at_least_k_of_family(int k, const PredicateFamily& fam);

/// Atoms (1-based, ascending) whose flip changes the value somewhere.
std::vector<int> relevant_variables(const Predicate& p);

// Serialization: {"n_atoms", "depth", "table", "label"} where table is the
// truth table read as a big integer (input index = bit position), written as
// lowercase hex with ceil(2^n / 4) digits, most significant digit first.

std::string table_to_hex(const Predicate& p);
std::vector<std::uint64_t> table_from_hex(const Universe& u, std::string_view hex);

nlohmann::json to_json(const Predicate& p);
Predicate predicate_from_json(const nlohmann::json& j);

nlohmann::json to_json(const PredicateFamily& fam);
PredicateFamily family_from_json(const nlohmann::json& j, std::string label = {});
PredicateFamily load_family(const std::string& path);

}  // namespace logicdepth
