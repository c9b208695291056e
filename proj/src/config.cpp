#include "qvortex/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace qvortex {

namespace {

std::string trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError("invalid value for '" + key + "': " + text);
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& origin) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse(in, path);
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<double>(key, *v);
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<std::int64_t>(key, *v);
}

std::optional<std::uint64_t> KeyValueConfig::get_u64(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<std::uint64_t>(key, *v);
}

std::optional<bool> KeyValueConfig::get_bool(const std::string& key) const {
  auto v = get(key);
  if (!v) return std::nullopt;
  if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") return true;
  if (*v == "0" || *v == "false" || *v == "no" || *v == "off") return false;
  throw ConfigError("invalid boolean for '" + key + "': " + *v);
}

ModelParams params_from_config(const KeyValueConfig& cfg, ModelParams p) {
  if (auto v = cfg.get_double("lambda_total")) p.lambda_total = *v;
  if (auto v = cfg.get_double("epsilon")) p.epsilon = *v;
  if (auto v = cfg.get_double("gamma")) p.gamma = *v;
  if (auto v = cfg.get_double("alpha")) p.alpha = *v;
  if (auto v = cfg.get_double("radius")) p.radius = *v;
  if (auto v = cfg.get_double("mu")) p.mu = *v;
  return p;
}

}  // namespace qvortex
