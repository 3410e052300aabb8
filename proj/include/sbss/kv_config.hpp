// Copyright 2026 The sparsebss Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef SBSS_KV_CONFIG_HPP_
#define SBSS_KV_CONFIG_HPP_

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace sbss {

/// Plain "key = value" file. Blank lines and text after '#' are ignored.
/// Keys may repeat; list values are separated by commas and/or whitespace.
/// Every accessor throws ConfigError naming the source and the key.
class KvConfig {
 public:
  static KvConfig parse(std::istream& in, const std::string& origin = "<input>");
  static KvConfig read(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  /// Every value given for key, in file order.
  std::vector<std::string> all(const std::string& key) const;

  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long long integer(const std::string& key) const;
  long long integer(const std::string& key, long long fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> strings(const std::string& key) const;

  /// Throws if a key outside allowed is present.
  void check_keys(const std::vector<std::string>& allowed) const;

  const std::string& origin() const { return origin_; }

 private:
  std::string single(const std::string& key) const;

  std::string origin_;
  std::map<std::string, std::vector<std::string>> values_;
};

/// Splits on commas and whitespace, dropping empty items.
std::vector<std::string> split_list(const std::string& text);

double parse_number(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);

}  // namespace sbss

#endif  // SBSS_KV_CONFIG_HPP_
