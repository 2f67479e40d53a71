#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>

namespace tripboost {

/// Plain `key = value` configuration. `#` starts a comment; blank lines are
/// ignored; keys are case-sensitive; later duplicates override earlier ones.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<stream>");
  static KeyValueConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  /// Typed accessors throw ConfigError naming the key when the value is malformed.
  std::optional<double> get_double(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<std::uint64_t> get_uint(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

}  // namespace tripboost
