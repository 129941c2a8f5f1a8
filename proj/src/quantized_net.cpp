#include "logicdepth/quantized_net.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "logicdepth/errors.hpp"

namespace logicdepth {

namespace {

std::string node_name(int layer, int node) {
  return "layer " + std::to_string(layer) + " node " + std::to_string(node);
}

std::int64_t get_int(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<std::int64_t>();
}

}  // namespace

std::string to_string(Activation a) {
  switch (a) {
    case Activation::sign: return "sign";
    case Activation::clipped_relu: return "clipped_relu";
    case Activation::identity: return "identity";
  }
  return "?";
}

Activation activation_from_string(const std::string& s) {
  if (s == "sign") return Activation::sign;
  if (s == "clipped_relu" || s == "clipped-relu") return Activation::clipped_relu;
  if (s == "identity") return Activation::identity;
  throw ConfigError("unknown activation '" + s + "'");
}

QuantizedNet::QuantizedNet(int input_bits, int bit_width, Activation activation,
                           std::vector<DenseLayer> layers)
    : input_bits_(input_bits),
      bit_width_(bit_width),
      activation_(activation),
      layers_(std::move(layers)) {
  if (input_bits_ < 1 || input_bits_ > 30) {
    throw DomainError("input_bits " + std::to_string(input_bits_) + " outside [1, 30]");
  }
  if (bit_width_ < 1 || bit_width_ > 32) {
    throw DomainError("bit_width " + std::to_string(bit_width_) + " outside [1, 32]");
  }
  if (layers_.empty()) throw DomainError("network has no layers");

  int fan_in = input_bits_;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const int lj = static_cast<int>(l) + 1;
    if (layer.weights.empty()) {
      throw DomainError("layer " + std::to_string(lj) + " has no nodes");
    }
    if (layer.bias.size() != layer.weights.size()) {
      throw DomainError("layer " + std::to_string(lj) + ": " + std::to_string(layer.bias.size()) +
                        " biases for " + std::to_string(layer.weights.size()) + " nodes");
    }
    for (int n = 0; n < layer.outputs(); ++n) {
      const auto& row = layer.weights[static_cast<std::size_t>(n)];
      if (static_cast<int>(row.size()) != fan_in) {
        throw DomainError(node_name(lj, n) + ": " + std::to_string(row.size()) +
                          " weights, previous layer has " + std::to_string(fan_in) + " outputs");
      }
      for (auto w : row) {
        if (w < min_value() || w > max_value()) {
          throw DomainError(node_name(lj, n) + ": weight " + std::to_string(w) +
                            " not representable in " + std::to_string(bit_width_) + " bits");
        }
      }
      const auto b = layer.bias[static_cast<std::size_t>(n)];
      if (b < min_value() || b > max_value()) {
        throw DomainError(node_name(lj, n) + ": bias " + std::to_string(b) +
                          " not representable in " + std::to_string(bit_width_) + " bits");
      }
    }
    fan_in = layer.outputs();
  }
}

int QuantizedNet::width() const noexcept {
  int w = 0;
  for (const auto& l : layers_) w = std::max(w, l.outputs());
  return w;
}

int QuantizedNet::node_count() const noexcept {
  int n = 0;
  for (const auto& l : layers_) n += l.outputs();
  return n;
}

std::vector<std::vector<std::int64_t>> QuantizedNet::evaluate(std::uint32_t input) const {
  std::vector<std::int64_t> prev(static_cast<std::size_t>(input_bits_));
  for (int i = 0; i < input_bits_; ++i) prev[static_cast<std::size_t>(i)] = (input >> i) & 1U;

  std::vector<std::vector<std::int64_t>> values;
  values.reserve(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    std::vector<std::int64_t> out(layer.weights.size());
    for (std::size_t n = 0; n < layer.weights.size(); ++n) {
      std::int64_t v = layer.bias[n];
      for (std::size_t i = 0; i < prev.size(); ++i) v += layer.weights[n][i] * prev[i];
      switch (activation_) {
        case Activation::sign: v = v >= 0 ? 1 : 0; break;
        case Activation::clipped_relu: v = std::clamp<std::int64_t>(v, 0, max_value()); break;
        case Activation::identity: break;
      }
      if (v < min_value() || v > max_value()) {
        const int lj = static_cast<int>(l) + 1;
        throw CompileError(node_name(lj, static_cast<int>(n)) + ": value " + std::to_string(v) +
                               " overflows " + std::to_string(bit_width_) + "-bit range on input " +
                               std::to_string(input),
                           lj, static_cast<int>(n));
      }
      out[n] = v;
    }
    prev = out;
    values.push_back(std::move(out));
  }
  return values;
}

nlohmann::json to_json(const QuantizedNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"weights", l.weights}, {"bias", l.bias}});
  }
  return nlohmann::json{{"version", kWeightsFormatVersion},
                        {"input_bits", net.input_bits()},
                        {"bit_width", net.bit_width()},
                        {"activation", to_string(net.activation())},
                        {"layers", std::move(layers)}};
}

QuantizedNet net_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kTop{"version", "input_bits", "bit_width", "activation",
                                          "layers"};
  if (!j.is_object()) throw ConfigError("weights: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!kTop.contains(key)) throw ConfigError("weights: unknown key '" + key + "'");
  }
  for (const auto& key : kTop) {
    if (!j.contains(key)) throw ConfigError("weights: missing '" + key + "'");
  }
  const auto version = get_int(j["version"], "weights.version");
  if (version != kWeightsFormatVersion) {
    throw ConfigError("weights.version: unsupported version " + std::to_string(version));
  }
  const int input_bits = static_cast<int>(get_int(j["input_bits"], "weights.input_bits"));
  const int bit_width = static_cast<int>(get_int(j["bit_width"], "weights.bit_width"));
  if (!j["activation"].is_string()) throw ConfigError("weights.activation: expected a string");
  const Activation act = activation_from_string(j["activation"].get<std::string>());

  const auto& jl = j["layers"];
  if (!jl.is_array()) throw ConfigError("weights.layers: expected an array");
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l < jl.size(); ++l) {
    const std::string where = "weights.layers[" + std::to_string(l) + "]";
    const auto& rec = jl[l];
    if (!rec.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : rec.items()) {
      if (key != "weights" && key != "bias") {
        throw ConfigError(where + ": unknown key '" + key + "'");
      }
    }
    if (!rec.contains("weights") || !rec["weights"].is_array()) {
      throw ConfigError(where + ".weights: expected an array of rows");
    }
    if (!rec.contains("bias") || !rec["bias"].is_array()) {
      throw ConfigError(where + ".bias: expected an array");
    }
    DenseLayer layer;
    for (std::size_t n = 0; n < rec["weights"].size(); ++n) {
      const auto& row = rec["weights"][n];
      const std::string rw = where + ".weights[" + std::to_string(n) + "]";
      if (!row.is_array()) throw ConfigError(rw + ": expected an array");
      std::vector<std::int64_t> r;
      for (std::size_t i = 0; i < row.size(); ++i) {
        r.push_back(get_int(row[i], rw + "[" + std::to_string(i) + "]"));
      }
      layer.weights.push_back(std::move(r));
    }
    for (std::size_t n = 0; n < rec["bias"].size(); ++n) {
      layer.bias.push_back(get_int(rec["bias"][n], where + ".bias[" + std::to_string(n) + "]"));
    }
    layers.push_back(std::move(layer));
  }
  try {
    return QuantizedNet(input_bits, bit_width, act, std::move(layers));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }
}

QuantizedNet load_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open weights file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  try {
    return net_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

QuantizedNet random_net(Rng& rng, int input_bits, int bit_width, Activation activation,
                        const std::vector<int>& widths) {
  const std::int64_t lo = -(std::int64_t{1} << (bit_width - 1));
  const std::int64_t hi = (std::int64_t{1} << (bit_width - 1)) - 1;
  std::vector<DenseLayer> layers;
  int fan_in = input_bits;
  for (int width : widths) {
    DenseLayer layer;
    for (int n = 0; n < width; ++n) {
      std::vector<std::int64_t> row(static_cast<std::size_t>(fan_in));
      for (auto& w : row) w = rng.uniform_int(lo, hi);
      layer.weights.push_back(std::move(row));
      layer.bias.push_back(rng.uniform_int(lo, hi));
    }
    layers.push_back(std::move(layer));
    fan_in = width;
  }
  return QuantizedNet(input_bits, bit_width, activation, std::move(layers));
}

QuantizedNet random_net(Rng& rng, const RandomNetShape& shape) {
  const int depth = static_cast<int>(rng.uniform_int(1, shape.max_depth));
  std::vector<int> widths(static_cast<std::size_t>(depth));
  for (auto& w : widths) w = static_cast<int>(rng.uniform_int(1, shape.max_width));
  return random_net(rng, shape.input_bits, shape.bit_width, shape.activation, widths);
}

}  // namespace logicdepth
