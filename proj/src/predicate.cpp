#include "logicdepth/predicate.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "logicdepth/errors.hpp"

namespace logicdepth {

namespace {

std::uint64_t tail_mask(const Universe& u) {
  const std::size_t rem = u.size() % 64;
  return rem == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << rem) - 1;
}

void require_shared_universe(std::span<const Predicate> ps, const char* what) {
  for (const auto& p : ps) {
    if (!(p.universe() == ps.front().universe())) {
      throw DomainError(std::string(what) + ": operands live in different universes (" +
                        std::to_string(ps.front().universe().n_atoms()) + " vs " +
                        std::to_string(p.universe().n_atoms()) + " atoms)");
    }
  }
}

const char* op_name(BoolOp kind) {
  switch (kind) {
    case BoolOp::land: return "and";
    case BoolOp::lor: return "or";
    case BoolOp::lnot: return "not";
    case BoolOp::lxor: return "xor";
  }
  return "?";
}

}  // namespace

Universe::Universe(int n_atoms) : n_atoms_(n_atoms) {
  if (n_atoms < 0 || n_atoms > kMaxAtoms) {
    throw DomainError("universe size " + std::to_string(n_atoms) + " outside [0, " +
                      std::to_string(kMaxAtoms) + "]");
  }
}

Predicate::Predicate(Universe universe, std::vector<std::uint64_t> words, int depth,
                     std::string label)
    : universe_(universe), words_(std::move(words)), depth_(depth), label_(std::move(label)) {
  if (words_.size() != word_count(universe_)) {
    throw DomainError("truth table has " + std::to_string(words_.size()) +
                      " words, universe needs " + std::to_string(word_count(universe_)));
  }
  if (depth_ < 0) throw DomainError("negative logic depth");
  if ((words_.back() & ~tail_mask(universe_)) != 0) {
    throw DomainError("truth table has bits set beyond 2^n_atoms");
  }
}

Predicate Predicate::constant(Universe universe, bool value, std::string label) {
  std::vector<std::uint64_t> words(word_count(universe), value ? ~std::uint64_t{0} : 0);
  words.back() &= tail_mask(universe);
  if (label.empty()) label = value ? "true" : "false";
  return Predicate(universe, std::move(words), 0, std::move(label));
}

Predicate Predicate::from_bits(Universe universe, std::string_view bits, int depth,
                               std::string label) {
  if (bits.size() != universe.size()) {
    throw DomainError("bit string of length " + std::to_string(bits.size()) +
                      " does not cover " + std::to_string(universe.size()) + " inputs");
  }
  for (char c : bits) {
    if (c != '0' && c != '1') throw DomainError("bit string may only contain '0' and '1'");
  }
  return from_function(
      universe, [&](std::size_t x) { return bits[x] == '1'; }, depth, std::move(label));
}

bool Predicate::at(std::size_t input) const {
  if (input >= size()) {
    throw DomainError("input index " + std::to_string(input) + " outside universe of size " +
                      std::to_string(size()));
  }
  return (*this)[input];
}

std::size_t Predicate::count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

bool Predicate::is_constant() const noexcept {
  const std::size_t c = count();
  return c == 0 || c == size();
}

bool Predicate::same_table(const Predicate& other) const noexcept {
  return universe_ == other.universe_ && words_ == other.words_;
}

std::string Predicate::bit_string() const {
  std::string out(size(), '0');
  for (std::size_t x = 0; x < size(); ++x) {
    if ((*this)[x]) out[x] = '1';
  }
  return out;
}

Predicate Predicate::with_label(std::string label) const {
  Predicate copy = *this;
  copy.label_ = std::move(label);
  return copy;
}

Predicate Predicate::with_depth(int depth) const {
  return Predicate(universe_, words_, depth, label_);
}

Predicate Predicate::flipped(std::size_t input) const {
  if (input >= size()) throw DomainError("flip index outside universe");
  Predicate copy = *this;
  copy.words_[input / 64] ^= std::uint64_t{1} << (input % 64);
  return copy;
}

PredicateFamily::PredicateFamily(std::string label, std::vector<Predicate> members)
    : label_(std::move(label)) {
  members_.reserve(members.size());
  for (auto& m : members) add(std::move(m));
}

void PredicateFamily::add(Predicate member) {
  if (!members_.empty() && !(member.universe() == members_.front().universe())) {
    throw DomainError("family '" + label_ + "': member '" + member.label() +
                      "' lives in a different universe");
  }
  for (const auto& m : members_) {
    if (m.label() == member.label()) {
      throw DomainError("family '" + label_ + "': duplicate member id '" + member.label() + "'");
    }
  }
  members_.push_back(std::move(member));
}

std::optional<Universe> PredicateFamily::universe() const {
  if (members_.empty()) return std::nullopt;
  return members_.front().universe();
}

int PredicateFamily::max_depth() const noexcept {
  int d = 0;
  for (const auto& m : members_) d = std::max(d, m.depth());
  return d;
}

std::vector<std::string> PredicateFamily::ids() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.label());
  return out;
}

Predicate atom(int index, const Universe& u) {
  if (index < 1 || index > u.n_atoms()) {
    throw DomainError("atom index " + std::to_string(index) + " outside 1.." +
                      std::to_string(u.n_atoms()));
  }
  const std::size_t shift = static_cast<std::size_t>(index - 1);
  return Predicate::from_function(
      u, [shift](std::size_t x) { return ((x >> shift) & 1U) != 0; }, 0,
      "x" + std::to_string(index));
}

PredicateFamily atoms(const Universe& u) {
  PredicateFamily fam("atoms");
  for (int i = 1; i <= u.n_atoms(); ++i) fam.add(atom(i, u));
  return fam;
}

Predicate combine(BoolOp kind, std::span<const Predicate> operands) {
  if (kind == BoolOp::lnot ? operands.size() != 1 : operands.size() < 2) {
    throw DomainError(std::string(op_name(kind)) + " given " + std::to_string(operands.size()) +
                      " operands");
  }
  require_shared_universe(operands, op_name(kind));

  const Universe u = operands.front().universe();
  std::vector<std::uint64_t> words(operands.front().words().begin(),
                                   operands.front().words().end());
  int depth = operands.front().depth();
  std::string label = std::string(op_name(kind)) + "(" + operands.front().label();

  if (kind == BoolOp::lnot) {
    for (auto& w : words) w = ~w;
    words.back() &= tail_mask(u);
  }
  for (const auto& p : operands.subspan(1)) {
    const auto src = p.words();
    for (std::size_t i = 0; i < words.size(); ++i) {
      switch (kind) {
        case BoolOp::land: words[i] &= src[i]; break;
        case BoolOp::lor: words[i] |= src[i]; break;
        case BoolOp::lxor: words[i] ^= src[i]; break;
        case BoolOp::lnot: break;
      }
    }
    depth = std::max(depth, p.depth());
    label += "," + p.label();
  }
  label += ")";
  return Predicate(u, std::move(words), depth, std::move(label));
}

Predicate combine(BoolOp kind, std::initializer_list<Predicate> operands) {
  return combine(kind, std::span<const Predicate>(operands.begin(), operands.size()));
}

Predicate at_least_k_true(int k, const Universe& u) {
  if (k < 0) throw DomainError("threshold count must be non-negative");
  return Predicate::from_function(
      u, [k](std::size_t x) { return std::popcount(x) >= k; }, 2,
      "at_least_" + std::to_string(k) + "_of_" + std::to_string(u.n_atoms()));
}

Predicate at_least_k_of_family(int k, const PredicateFamily& fam) {
  if (k < 0) throw DomainError("threshold count must be non-negative");
  if (fam.empty()) throw DomainError("counting over an empty family");
  const Universe u = *fam.universe();
  std::vector<int> hits(u.size(), 0);
  for (const auto& m : fam) {
    for (std::size_t x = 0; x < u.size(); ++x) hits[x] += m[x] ? 1 : 0;
  }
  return Predicate::from_function(
      u, [&](std::size_t x) { return hits[x] >= k; }, fam.max_depth() + 2,
      "at_least_" + std::to_string(k) + "_of_" + (fam.label().empty() ? "family" : fam.label()));
}

std::vector<int> relevant_variables(const Predicate& p) {
  std::vector<int> out;
  const std::size_t n = static_cast<std::size_t>(p.universe().n_atoms());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t x = 0; x < p.size(); ++x) {
      if ((x & bit) == 0 && p[x] != p[x | bit]) {
        out.push_back(static_cast<int>(i) + 1);
        break;
      }
    }
  }
  return out;
}

}  // namespace logicdepth
