#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvrpg {

/// Flat key=value configuration with dotted section prefixes
/// (env., algo., utility., schedule., linfa., log.). Lines starting with '#'
/// are comments. Unknown keys are rejected at resolution time so typos fail
/// loudly instead of silently using a default.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
  }

  static Config from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::string stripped = trim(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                    " is not key=value");
      const std::string key = trim(stripped.substr(0, eq));
      const std::string value = trim(stripped.substr(eq + 1));
      if (key.empty())
        throw std::invalid_argument("config: empty key on line " + std::to_string(line_no));
      cfg.values_[key] = value;
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) const {
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("config: missing key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key, double fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_double(key, it->second);
  }

  long long get_int(const std::string& key, long long fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    return parse_int(key, it->second);
  }

  bool get_bool(const std::string& key, bool fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean");
  }

  std::vector<std::uint64_t> get_seed_list(const std::string& key,
                                           std::vector<std::uint64_t> fallback) const {
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::uint64_t> seeds;
    std::istringstream in(it->second);
    std::string token;
    while (std::getline(in, token, ',')) {
      const std::string s = trim(token);
      if (s.empty()) continue;
      seeds.push_back(std::stoull(s));
    }
    if (seeds.empty()) throw std::invalid_argument("config: key '" + key + "' has no seeds");
    return seeds;
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  /// Sorted key=value dump, used for the resolved-config echo and the CSV
  /// metadata block.
  std::string serialize() const {
    std::string out;
    for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
    return out;
  }

  const std::map<std::string, std::string>& entries() const { return values_; }

  /// Rejects keys outside the allowed set (exact match or listed prefix).
  void check_known_keys(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : values_) {
      bool ok = false;
      for (const auto& k : known)
        if (key == k) {
          ok = true;
          break;
        }
      if (!ok) throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }

 private:
  static std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  static double parse_double(const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config: key '" + key + "' is not a number: " + value);
    }
  }

  static long long parse_int(const std::string& key, const std::string& value) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(value, &used);
      if (used != value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config: key '" + key + "' is not an integer: " + value);
    }
  }

  std::map<std::string, std::string> values_;
};

}  // namespace nvrpg
