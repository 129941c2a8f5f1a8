#include <fstream>
#include <set>
#include <sstream>

#include "logicdepth/errors.hpp"
#include "logicdepth/predicate.hpp"

namespace logicdepth {

namespace {

std::size_t hex_digits(const Universe& u) { return u.size() < 4 ? 1 : u.size() / 4; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string table_to_hex(const Predicate& p) {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::size_t digits = hex_digits(p.universe());
  std::string out(digits, '0');
  for (std::size_t k = 0; k < digits; ++k) {
    unsigned nibble = 0;
    for (std::size_t b = 0; b < 4; ++b) {
      const std::size_t x = 4 * k + b;
      if (x < p.size() && p[x]) nibble |= 1U << b;
    }
    out[digits - 1 - k] = kDigits[nibble];
  }
  return out;
}

std::vector<std::uint64_t> table_from_hex(const Universe& u, std::string_view hex) {
  const std::size_t digits = hex_digits(u);
  if (hex.size() != digits) {
    throw ConfigError("table hex has " + std::to_string(hex.size()) + " digits, expected " +
                      std::to_string(digits) + " for " + std::to_string(u.n_atoms()) + " atoms");
  }
  std::vector<std::uint64_t> words(Predicate::word_count(u), 0);
  for (std::size_t k = 0; k < digits; ++k) {
    const int v = hex_value(hex[digits - 1 - k]);
    if (v < 0) throw ConfigError("table hex contains non-hex character");
    for (std::size_t b = 0; b < 4; ++b) {
      if (((v >> b) & 1) == 0) continue;
      const std::size_t x = 4 * k + b;
      if (x >= u.size()) throw ConfigError("table hex sets bits beyond 2^n_atoms");
      words[x / 64] |= std::uint64_t{1} << (x % 64);
    }
  }
  return words;
}

nlohmann::json to_json(const Predicate& p) {
  return nlohmann::json{{"n_atoms", p.universe().n_atoms()},
                        {"depth", p.depth()},
                        {"table", table_to_hex(p)},
                        {"label", p.label()}};
}

Predicate predicate_from_json(const nlohmann::json& j) {
  static const std::set<std::string> kKeys{"n_atoms", "depth", "table", "label"};
  if (!j.is_object()) throw ConfigError("predicate record must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("predicate record: unknown key '" + key + "'");
  }
  try {
    const Universe u(j.at("n_atoms").get<int>());
    const int depth = j.value("depth", 0);
    auto words = table_from_hex(u, j.at("table").get<std::string>());
    return Predicate(u, std::move(words), depth, j.value("label", std::string{}));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("predicate record: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("predicate record: ") + e.what());
  }
}

nlohmann::json to_json(const PredicateFamily& fam) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& m : fam) members.push_back(to_json(m));
  return nlohmann::json{{"label", fam.label()}, {"members", std::move(members)}};
}

PredicateFamily family_from_json(const nlohmann::json& j, std::string label) {
  const nlohmann::json* members = &j;
  if (j.is_object()) {
    for (const auto& [key, _] : j.items()) {
      if (key != "label" && key != "members") {
        throw ConfigError("predicate family: unknown key '" + key + "'");
      }
    }
    if (!j.contains("members")) throw ConfigError("predicate family: missing 'members'");
    members = &j.at("members");
    if (j.contains("label")) label = j.at("label").get<std::string>();
  }
  if (!members->is_array()) throw ConfigError("predicate family: members must be an array");
  PredicateFamily fam(std::move(label));
  std::size_t i = 0;
  for (const auto& rec : *members) {
    try {
      fam.add(predicate_from_json(rec));
    } catch (const std::exception& e) {
      throw ConfigError("members[" + std::to_string(i) + "]: " + e.what());
    }
    ++i;
  }
  return fam;
}

PredicateFamily load_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open predicate file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos) stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos) stem = stem.substr(0, dot);
  try {
    return family_from_json(j, stem);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace logicdepth
