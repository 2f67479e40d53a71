#include "tripboost/kv_config.hpp"

#include <charconv>
#include <fstream>

#include "tripboost/errors.hpp"

namespace tripboost {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
std::optional<T> parse_number(const std::string& key, const std::string& text,
                              const std::string& source) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ConfigError(source + ": key '" + key + "' has malformed value '" + text + "'");
  }
  return value;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  cfg.source_ = source;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::get_double(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<double>(key, *v, source_);
}

std::optional<std::int64_t> KeyValueConfig::get_int(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<std::int64_t>(key, *v, source_);
}

std::optional<std::uint64_t> KeyValueConfig::get_uint(const std::string& key) const {
  const auto v = get(key);
  if (!v) return std::nullopt;
  return parse_number<std::uint64_t>(key, *v, source_);
}

}  // namespace tripboost
