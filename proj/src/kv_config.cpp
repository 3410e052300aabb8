// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sbss/kv_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "sbss/errors.hpp"

namespace sbss {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double parse_number(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(what + ": '" + text + "' is not a finite number");
  }
  return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError(what + ": '" + text + "' is not an integer");
  }
  return v;
}

KvConfig KvConfig::parse(std::istream& in, const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.values_[key].push_back(value);
  }
  return cfg;
}

KvConfig KvConfig::read(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return parse(in, path);
}

std::vector<std::string> KvConfig::all(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? std::vector<std::string>{} : it->second;
}

std::string KvConfig::single(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(origin_ + ": missing key '" + key + "'");
  if (it->second.size() > 1) throw ConfigError(origin_ + ": key '" + key + "' given more than once");
  return it->second.front();
}

std::string KvConfig::string(const std::string& key) const { return single(key); }

std::string KvConfig::string(const std::string& key, const std::string& fallback) const {
  return has(key) ? single(key) : fallback;
}

double KvConfig::number(const std::string& key) const {
  return parse_number(single(key), origin_ + ": " + key);
}

double KvConfig::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long long KvConfig::integer(const std::string& key) const {
  return parse_integer(single(key), origin_ + ": " + key);
}

long long KvConfig::integer(const std::string& key, long long fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<double> KvConfig::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(single(key))) out.push_back(parse_number(item, origin_ + ": " + key));
  return out;
}

std::vector<std::string> KvConfig::strings(const std::string& key) const {
  return split_list(single(key));
}

void KvConfig::check_keys(const std::vector<std::string>& allowed) const {
  for (const auto& [key, v] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(origin_ + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace sbss
