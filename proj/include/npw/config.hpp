#pragma once

#include <map>
#include <string>
#include <vector>

namespace npw {

/// Line-oriented `key = value` file with `#` comments. Keys may be dotted
/// (`grid.nx`); values are free text until end of line. Used for scenario
/// configs and coefficient tables.
class KeyValueFile {
 public:
  static KeyValueFile load(const std::string& path);
  static KeyValueFile parse(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Throw ConfigError (with origin and key) when missing/malformed.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Comma-separated list of doubles; empty value -> empty list.
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;
  /// Comma-separated list of tokens; empty value -> empty list.
  std::vector<std::string> get_string_list(const std::string& key,
                                           const std::vector<std::string>& fallback) const;

  /// Override or add a key (CLI flags layered over the file).
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  const std::string& origin() const { return origin_; }

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;
};

}  // namespace npw
