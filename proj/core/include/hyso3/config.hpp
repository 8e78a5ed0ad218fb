#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace hyso3 {

/// A configuration problem tied to a key (or a line, for syntax errors).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/**
 * Evaluates a numeric literal with optional `pi` arithmetic:
 * `0.9*pi`, `pi - 1e-9`, `7/pi^2`, `-2.5e-3`. Supports + - * / ^ and parentheses.
 */
double parse_number(const std::string& text);

/// `[a, b, c]` with each element accepted by parse_number. Brackets are required.
std::vector<double> parse_list(const std::string& text);

/**
 * Flat `key = value` text. `#` starts a comment; blank lines are ignored;
 * duplicate keys are rejected. Keys are read through the typed getters, which
 * mark them as used so that leftovers can be reported as unknown.
 */
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& source = "<config>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::string& raw(const std::string& key) const;

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_list(const std::string& key) const;
  std::vector<std::string> get_name_list(const std::string& key) const;

  /// Keys never read through a getter.
  std::vector<std::string> unused_keys() const;
  const std::string& source() const { return source_; }
  std::vector<std::string> keys() const;

 private:
  std::string source_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace hyso3
