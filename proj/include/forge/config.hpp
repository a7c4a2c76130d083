// Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace forge {

// Line-based `key = value` configuration with dotted section prefixes, e.g.
//   bt.rounds = 2
//   translator.rev.cmd = ./translate.sh {in} {out}
// Blank lines and lines starting with '#' are ignored.
class ConfigFile {
 public:
  ConfigFile() = default;

  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_string(std::string_view text, const std::string& origin = "<config>");

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> get(const std::string& key) const;
  std::string get_or(const std::string& key, std::string fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  void set(const std::string& key, std::string value);
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  // Canonical "key = value" rendering, sorted by key; digest-stable.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

// Comma-separated list, fields trimmed, empties dropped.
std::vector<std::string> split_list(std::string_view text);

}  // namespace forge
