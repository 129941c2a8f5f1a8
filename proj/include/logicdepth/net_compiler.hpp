#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "logicdepth/predicate.hpp"
#include "logicdepth/quantized_net.hpp"

namespace logicdepth {

inline constexpr int kMaxCompileInputBits = 16;

/// One achievable output vector of the last layer and its preimage.
struct OutputClass {
  std::vector<std::int64_t> value;
  Predicate predicate;

  friend bool operator==(const OutputClass&, const OutputClass&) = default;
};

/// Bit-level logical form of a QuantizedNet over its input universe.
///
/// Layers are numbered from 1 (the first hidden layer); nodes and bits from 0,
/// bit 0 being the least-significant bit of the two's complement value.
struct PredicateCircuit {
  QuantizedNet net;
  /// bit_tables[layer - 1][node][bit]
  std::vector<std::vector<std::vector<Predicate>>> bit_tables;
  /// Sorted by value; together they partition the input space.
  std::vector<OutputClass> output_tables;

  Universe universe() const { return Universe(net.input_bits()); }
  int trace_bits() const noexcept { return net.trace_bits(); }

  /// Concatenation of every node bit (layer, node, bit order) on `input`,
  /// read from the stored tables.
  std::vector<bool> trace(std::uint32_t input) const;

  friend bool operator==(const PredicateCircuit&, const PredicateCircuit&) = default;
};

/// Exhaustively evaluates `net` on all 2^input_bits inputs.
/// Throws PreconditionError above kMaxCompileInputBits, CompileError on overflow.
PredicateCircuit compile_net(const QuantizedNet& net);

/// Depth metadata is 2 * layer.
const Predicate& bit_predicate(const PredicateCircuit& circuit, int layer, int node, int bit);

/// Net_{d,w}(x, y): true on x iff the last layer outputs `y`.
/// Unachievable y gives the all-zeros predicate.
Predicate net_predicate(const PredicateCircuit& circuit, const std::vector<std::int64_t>& y);

struct BitLocation {
  int layer;
  int node;
  int bit;
};

struct VerificationReport {
  bool verified = false;
  std::optional<std::uint32_t> first_failing_input;
  std::optional<BitLocation> first_failing_bit;  ///< unset when an output table is at fault

  explicit operator bool() const noexcept { return verified; }
};

/// Re-evaluates the net on every input and compares every stored table.
VerificationReport verify_compilation(const PredicateCircuit& circuit);

/// Circuit export: bit tables then output tables, as predicate records.
nlohmann::json to_json(const PredicateCircuit& circuit);

}  // namespace logicdepth
