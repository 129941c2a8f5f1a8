#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace logicdepth {

/// Bad index, universe mismatch, wrong arity and similar caller mistakes.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An operation's stated precondition does not hold (e.g. n < w + 1).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A file or experiment configuration could not be parsed or is inconsistent.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node value left the declared two's complement range during compilation.
class CompileError : public std::runtime_error {
 public:
  CompileError(const std::string& what, int layer, int node)
      : std::runtime_error(what), layer_(layer), node_(node) {}

  int layer() const noexcept { return layer_; }
  int node() const noexcept { return node_; }

 private:
  int layer_;
  int node_;
};

/// The subset search hit its cap before finding a witness.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t tested, std::uint64_t remaining)
      : std::runtime_error(what), tested_(tested), remaining_(remaining) {}

  std::uint64_t subsets_tested() const noexcept { return tested_; }
  std::uint64_t subsets_remaining() const noexcept { return remaining_; }

 private:
  std::uint64_t tested_;
  std::uint64_t remaining_;
};

}  // namespace logicdepth
