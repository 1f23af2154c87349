#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bvd/error.hpp"

namespace bvd::cli {

/// Flat "section.key = value" file. Blank lines and text after '#' are ignored.
/// Problems are collected rather than thrown one at a time, so a single pass
/// can name every bad key; call finish() to raise them together.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin = "config") {
    KeyValueConfig c;
    c.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      const std::string body = trim(line);
      if (body.empty()) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        c.problems_.push_back("line " + std::to_string(lineno) + ": expected 'section.key = value'");
        continue;
      }
      const std::string key = trim(body.substr(0, eq));
      const std::string value = trim(body.substr(eq + 1));
      const auto dot = key.find('.');
      if (key.empty() || dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
          key.find_first_of(" \t") != std::string::npos) {
        c.problems_.push_back("line " + std::to_string(lineno) + ": malformed key '" + key + "'");
        continue;
      }
      if (c.values_.count(key)) {
        c.problems_.push_back(key + ": duplicate key (line " + std::to_string(lineno) + ")");
        continue;
      }
      c.values_[key] = value;
    }
    return c;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::optional<std::string> raw(const std::string& key) {
    known_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::string get_string(const std::string& key, std::optional<std::string> fallback = {}) {
    auto v = raw(key);
    if (!v) return require(key, fallback, std::string{});
    if (v->empty()) {
      problems_.push_back(key + ": empty value");
      return {};
    }
    return *v;
  }

  double get_double(const std::string& key, std::optional<double> fallback = {}) {
    auto v = raw(key);
    if (!v) return require(key, fallback, 0.0);
    double x = 0.0;
    if (!parse_double(*v, x)) {
      problems_.push_back(key + ": not a finite number: '" + *v + "'");
      return fallback.value_or(0.0);
    }
    return x;
  }

  std::uint64_t get_uint(const std::string& key, std::optional<std::uint64_t> fallback = {}) {
    auto v = raw(key);
    if (!v) return require(key, fallback, std::uint64_t{0});
    std::uint64_t x = 0;
    if (!parse_uint(*v, x)) {
      problems_.push_back(key + ": not a non-negative integer: '" + *v + "'");
      return fallback.value_or(0);
    }
    return x;
  }

  bool get_bool(const std::string& key, std::optional<bool> fallback = {}) {
    auto v = raw(key);
    if (!v) return require(key, fallback, false);
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    problems_.push_back(key + ": not a boolean: '" + *v + "'");
    return fallback.value_or(false);
  }

  /// Comma-separated list of numbers; "inf" is accepted.
  std::vector<double> get_list(const std::string& key, std::optional<std::vector<double>> fallback = {}) {
    auto v = raw(key);
    if (!v) return require(key, fallback, std::vector<double>{});
    std::vector<double> out;
    for (const auto& item : split_list(*v)) {
      double x = 0.0;
      if (item == "inf") {
        x = INFINITY;
      } else if (!parse_double(item, x)) {
        problems_.push_back(key + ": bad list entry '" + item + "'");
        continue;
      }
      out.push_back(x);
    }
    if (out.empty()) problems_.push_back(key + ": empty list");
    return out;
  }

  std::vector<std::string> get_words(const std::string& key,
                                     std::optional<std::vector<std::string>> fallback = {}) {
    auto v = raw(key);
    if (!v) return require(key, fallback, std::vector<std::string>{});
    return split_list(*v);
  }

  /// Record a semantic problem with a key.
  void invalid(const std::string& key, const std::string& why) { problems_.push_back(key + ": " + why); }

  /// Throws ConfigError naming every problem, including unknown keys.
  void finish() {
    for (const auto& [k, v] : values_) {
      if (!known_.count(k)) problems_.push_back(k + ": unknown key");
    }
    if (problems_.empty()) return;
    std::string msg = origin_ + ": " + std::to_string(problems_.size()) + " problem(s)";
    for (const auto& p : problems_) msg += "\n  " + p;
    throw ConfigError(msg);
  }

  const std::vector<std::string>& problems() const { return problems_; }

 private:
  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback, T empty) {
    if (fallback) return *fallback;
    problems_.push_back(key + ": missing required key");
    return empty;
  }

  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  static std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  static bool parse_double(const std::string& s, double& x) {
    char* end = nullptr;
    x = std::strtod(s.c_str(), &end);
    return end != s.c_str() && *end == '\0' && std::isfinite(x);
  }

  static bool parse_uint(const std::string& s, std::uint64_t& x) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) return false;
    char* end = nullptr;
    x = std::strtoull(s.c_str(), &end, 10);
    return *end == '\0';
  }

  std::string origin_;
  std::map<std::string, std::string> values_;
  std::set<std::string> known_;
  std::vector<std::string> problems_;
};

}  // namespace bvd::cli
