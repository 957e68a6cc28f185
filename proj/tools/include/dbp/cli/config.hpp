// Copyright 2026 The dbp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dbp::cli {

/// Malformed config text, a missing or unknown key, or an out-of-range value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text grouped under `[section]` headers. `#` and `;`
/// start comment lines.
class ConfigFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static ConfigFile parse(std::istream& in, std::string source = "<config>");
  static ConfigFile load(const std::string& path);

  const std::string& source() const noexcept { return source_; }
  const Entry* find(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  std::vector<std::pair<std::string, std::string>> keys() const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Typed, tracked access to a ConfigFile. Every key a command understands is
/// read through here; finish() then rejects anything left over.
class ConfigReader {
 public:
  explicit ConfigReader(const ConfigFile& file) : file_(file) {}

  std::optional<std::string> text(const std::string& section, const std::string& key);
  std::string text_or(const std::string& section, const std::string& key, std::string fallback);

  std::optional<double> real(const std::string& section, const std::string& key);
  double real_or(const std::string& section, const std::string& key, double fallback);

  std::optional<std::int64_t> integer(const std::string& section, const std::string& key);
  std::int64_t integer_or(const std::string& section, const std::string& key,
                          std::int64_t fallback);

  /// Comma-separated numbers; `start:step:stop` expands to an inclusive range.
  std::optional<std::vector<double>> reals(const std::string& section, const std::string& key);
  std::optional<std::vector<std::string>> words(const std::string& section,
                                                const std::string& key);

  /// Throws ConfigError naming every key that was never read.
  void finish() const;

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) const;

 private:
  const ConfigFile::Entry* lookup(const std::string& section, const std::string& key);

  const ConfigFile& file_;
  std::set<std::pair<std::string, std::string>> used_;
};

/// Parses one number list as accepted by ConfigReader::reals.
std::vector<double> parse_real_list(const std::string& text);

}  // namespace dbp::cli
