#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "logicdepth/random.hpp"

namespace logicdepth {

enum class Activation {
  sign,          ///< 1 if v >= 0 else 0
  clipped_relu,  ///< max(0, min(v, 2^(b-1) - 1))
  identity,      ///< v itself; must fit in b bits
};

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct DenseLayer {
  /// weights[node][input]
  std::vector<std::vector<std::int64_t>> weights;
  std::vector<std::int64_t> bias;

  int outputs() const noexcept { return static_cast<int>(weights.size()); }
  int inputs() const noexcept { return weights.empty() ? 0 : static_cast<int>(weights[0].size()); }
};

/// Fixed-point dense feed-forward network N_{d,w}.
///
/// Inputs are bits; every weight, bias and node value is a b-bit two's
/// complement integer. Pre-activation sums are exact (int64).
class QuantizedNet {
 public:
  QuantizedNet(int input_bits, int bit_width, Activation activation, std::vector<DenseLayer> layers);

  int input_bits() const noexcept { return input_bits_; }
  int bit_width() const noexcept { return bit_width_; }
  Activation activation() const noexcept { return activation_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }

  int depth() const noexcept { return static_cast<int>(layers_.size()); }
  int width() const noexcept;
  int node_count() const noexcept;
  /// Node bits across all layers: node_count() * bit_width().
  int trace_bits() const noexcept { return node_count() * bit_width_; }

  std::int64_t min_value() const noexcept { return -(std::int64_t{1} << (bit_width_ - 1)); }
  std::int64_t max_value() const noexcept { return (std::int64_t{1} << (bit_width_ - 1)) - 1; }

  /// Node values per layer (layer 1 first) for one input assignment.
  /// Throws CompileError when a node value leaves the b-bit range.
  std::vector<std::vector<std::int64_t>> evaluate(std::uint32_t input) const;

  friend bool operator==(const QuantizedNet& a, const QuantizedNet& b) {
    return a.input_bits_ == b.input_bits_ && a.bit_width_ == b.bit_width_ &&
           a.activation_ == b.activation_ && a.layers_ == b.layers_;
  }

 private:
  int input_bits_;
  int bit_width_;
  Activation activation_;
  std::vector<DenseLayer> layers_;
};

inline bool operator==(const DenseLayer& a, const DenseLayer& b) {
  return a.weights == b.weights && a.bias == b.bias;
}

// Weights file (version 1):
//   {"version": 1, "input_bits": n, "bit_width": b, "activation": "sign",
//    "layers": [{"weights": [[...], ...], "bias": [...]}, ...]}

inline constexpr int kWeightsFormatVersion = 1;

nlohmann::json to_json(const QuantizedNet& net);
QuantizedNet net_from_json(const nlohmann::json& j);
QuantizedNet load_weights(const std::string& path);

struct RandomNetShape {
  int max_depth = 3;
  int max_width = 4;
  int input_bits = 8;
  int bit_width = 4;
  Activation activation = Activation::clipped_relu;
};

/// Depth in [1, max_depth], per-layer width in [1, max_width], weights and
/// biases uniform over the b-bit range.
QuantizedNet random_net(Rng& rng, const RandomNetShape& shape);

/// Random net with exactly the given layer widths.
QuantizedNet random_net(Rng& rng, int input_bits, int bit_width, Activation activation,
                        const std::vector<int>& widths);

}  // namespace logicdepth
