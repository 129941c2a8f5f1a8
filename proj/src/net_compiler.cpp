#include "logicdepth/net_compiler.hpp"

#include <algorithm>
#include <map>

#include "logicdepth/errors.hpp"

namespace logicdepth {

namespace {

bool value_bit(std::int64_t v, int bit) {
  return ((static_cast<std::uint64_t>(v) >> bit) & 1U) != 0;
}

std::string value_label(const std::vector<std::int64_t>& y) {
  std::string s = "net=(";
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(y[i]);
  }
  return s + ")";
}

}  // namespace

std::vector<bool> PredicateCircuit::trace(std::uint32_t input) const {
  std::vector<bool> out;
  out.reserve(static_cast<std::size_t>(trace_bits()));
  for (const auto& layer : bit_tables) {
    for (const auto& node : layer) {
      for (const auto& bit : node) out.push_back(bit.at(input));
    }
  }
  return out;
}

PredicateCircuit compile_net(const QuantizedNet& net) {
  if (net.input_bits() > kMaxCompileInputBits) {
    throw PreconditionError("compile_net: " + std::to_string(net.input_bits()) +
                            " input bits exceeds the exhaustive bound of " +
                            std::to_string(kMaxCompileInputBits));
  }
  const Universe u(net.input_bits());
  const int b = net.bit_width();
  const auto& layers = net.layers();

  // words[layer][node][bit] accumulated over inputs.
  std::vector<std::vector<std::vector<std::vector<std::uint64_t>>>> words(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    words[l].assign(static_cast<std::size_t>(layers[l].outputs()),
                    std::vector<std::vector<std::uint64_t>>(
                        static_cast<std::size_t>(b),
                        std::vector<std::uint64_t>(Predicate::word_count(u), 0)));
  }
  std::map<std::vector<std::int64_t>, std::vector<std::uint64_t>> outputs;

  for (std::size_t x = 0; x < u.size(); ++x) {
    const auto values = net.evaluate(static_cast<std::uint32_t>(x));
    const std::uint64_t mask = std::uint64_t{1} << (x % 64);
    for (std::size_t l = 0; l < values.size(); ++l) {
      for (std::size_t n = 0; n < values[l].size(); ++n) {
        for (int i = 0; i < b; ++i) {
          if (value_bit(values[l][n], i)) words[l][n][static_cast<std::size_t>(i)][x / 64] |= mask;
        }
      }
    }
    auto [it, _] = outputs.try_emplace(values.back(), Predicate::word_count(u), 0);
    it->second[x / 64] |= mask;
  }

  PredicateCircuit circuit{net, {}, {}};
  circuit.bit_tables.resize(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const int lj = static_cast<int>(l) + 1;
    for (std::size_t n = 0; n < words[l].size(); ++n) {
      std::vector<Predicate> bits;
      for (int i = 0; i < b; ++i) {
        bits.emplace_back(u, std::move(words[l][n][static_cast<std::size_t>(i)]), 2 * lj,
                          "L" + std::to_string(lj) + ".n" + std::to_string(n) + ".b" +
                              std::to_string(i));
      }
      circuit.bit_tables[l].push_back(std::move(bits));
    }
  }
  const int out_depth = 2 * net.depth();
  for (auto& [value, w] : outputs) {
    circuit.output_tables.push_back({value, Predicate(u, std::move(w), out_depth, value_label(value))});
  }
  return circuit;
}

const Predicate& bit_predicate(const PredicateCircuit& circuit, int layer, int node, int bit) {
  if (layer < 1 || layer > static_cast<int>(circuit.bit_tables.size())) {
    throw DomainError("layer " + std::to_string(layer) + " outside 1.." +
                      std::to_string(circuit.bit_tables.size()));
  }
  const auto& nodes = circuit.bit_tables[static_cast<std::size_t>(layer - 1)];
  if (node < 0 || node >= static_cast<int>(nodes.size())) {
    throw DomainError("node " + std::to_string(node) + " outside layer " + std::to_string(layer));
  }
  const auto& bits = nodes[static_cast<std::size_t>(node)];
  if (bit < 0 || bit >= static_cast<int>(bits.size())) {
    throw DomainError("bit " + std::to_string(bit) + " outside " + std::to_string(bits.size()) +
                      "-bit node value");
  }
  return bits[static_cast<std::size_t>(bit)];
}

Predicate net_predicate(const PredicateCircuit& circuit, const std::vector<std::int64_t>& y) {
  const auto outs = static_cast<std::size_t>(circuit.net.layers().back().outputs());
  if (y.size() != outs) {
    throw DomainError("output value has " + std::to_string(y.size()) + " components, net has " +
                      std::to_string(outs) + " output nodes");
  }
  for (const auto& oc : circuit.output_tables) {
    if (oc.value == y) return oc.predicate;
  }
  return Predicate::constant(circuit.universe(), false, value_label(y))
      .with_depth(2 * circuit.net.depth());
}

VerificationReport verify_compilation(const PredicateCircuit& circuit) {
  VerificationReport report;
  const auto& net = circuit.net;
  const Universe u(net.input_bits());
  const int b = net.bit_width();

  auto shape_ok = circuit.bit_tables.size() == net.layers().size();
  for (std::size_t l = 0; shape_ok && l < net.layers().size(); ++l) {
    shape_ok = circuit.bit_tables[l].size() == static_cast<std::size_t>(net.layers()[l].outputs());
    for (const auto& node : circuit.bit_tables[l]) {
      shape_ok = shape_ok && node.size() == static_cast<std::size_t>(b);
      for (const auto& p : node) shape_ok = shape_ok && p.universe() == u;
    }
  }
  for (const auto& oc : circuit.output_tables) shape_ok = shape_ok && oc.predicate.universe() == u;
  if (!shape_ok) return report;

  for (std::size_t x = 0; x < u.size(); ++x) {
    std::vector<std::vector<std::int64_t>> values;
    try {
      values = net.evaluate(static_cast<std::uint32_t>(x));
    } catch (const CompileError&) {
      report.first_failing_input = static_cast<std::uint32_t>(x);
      return report;
    }
    for (std::size_t l = 0; l < values.size(); ++l) {
      for (std::size_t n = 0; n < values[l].size(); ++n) {
        for (int i = 0; i < b; ++i) {
          if (circuit.bit_tables[l][n][static_cast<std::size_t>(i)][x] != value_bit(values[l][n], i)) {
            report.first_failing_input = static_cast<std::uint32_t>(x);
            report.first_failing_bit =
                BitLocation{static_cast<int>(l) + 1, static_cast<int>(n), i};
            return report;
          }
        }
      }
    }
    for (const auto& oc : circuit.output_tables) {
      if (oc.predicate[x] != (oc.value == values.back())) {
        report.first_failing_input = static_cast<std::uint32_t>(x);
        return report;
      }
    }
    const bool covered = std::any_of(circuit.output_tables.begin(), circuit.output_tables.end(),
                                     [&](const OutputClass& oc) { return oc.value == values.back(); });
    if (!covered) {
      report.first_failing_input = static_cast<std::uint32_t>(x);
      return report;
    }
  }
  report.verified = true;
  return report;
}

nlohmann::json to_json(const PredicateCircuit& circuit) {
  nlohmann::json bits = nlohmann::json::array();
  for (const auto& layer : circuit.bit_tables) {
    for (const auto& node : layer) {
      for (const auto& p : node) bits.push_back(to_json(p));
    }
  }
  nlohmann::json outs = nlohmann::json::array();
  for (const auto& oc : circuit.output_tables) {
    outs.push_back({{"value", oc.value}, {"predicate", to_json(oc.predicate)}});
  }
  return nlohmann::json{{"net", to_json(circuit.net)},
                        {"bit_tables", std::move(bits)},
                        {"output_tables", std::move(outs)}};
}

}  // namespace logicdepth
