#ifndef QVORTEX_CONFIG_HPP
#define QVORTEX_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "qvortex/model.hpp"

namespace qvortex {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Line-based key = value file. '#' starts a comment, blank lines are ignored,
// keys are case-sensitive and a repeated key overrides the earlier value.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& origin = "<stream>");
  static KeyValueConfig load(const std::string& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::optional<std::string> get(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::uint64_t> get_u64(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Reads lambda_total, epsilon, gamma, alpha, radius and mu over the defaults.
ModelParams params_from_config(const KeyValueConfig& cfg, ModelParams defaults = {});

}  // namespace qvortex

#endif
