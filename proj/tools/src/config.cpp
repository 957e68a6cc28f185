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


#include "dbp/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace dbp::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (text.find_first_not_of(" \t") == std::string::npos) throw ConfigError("empty number list");
  for (const auto& item : split(text, ',')) {
    if (item.empty()) throw ConfigError("empty list element in '" + text + "'");
    if (item.find(':') != std::string::npos) {
      const auto r = split(item, ':');
      if (r.size() != 3) throw ConfigError("range '" + item + "' must be start:step:stop");
      const auto a = to_double(r[0]);
      const auto h = to_double(r[1]);
      const auto b = to_double(r[2]);
      if (!a || !h || !b) throw ConfigError("range '" + item + "' is not numeric");
      if (!(*h > 0.0) || *b < *a) {
        throw ConfigError("range '" + item + "' needs step > 0 and stop >= start");
      }
      const auto n = static_cast<long>(std::floor((*b - *a) / *h + 1e-9));
      if (n > 100000) throw ConfigError("range '" + item + "' has too many points");
      for (long k = 0; k <= n; ++k) out.push_back(*a + static_cast<double>(k) * *h);
    } else {
      const auto v = to_double(item);
      if (!v) throw ConfigError("'" + item + "' is not a finite number");
      out.push_back(*v);
    }
  }
  return out;
}

ConfigFile ConfigFile::parse(std::istream& in, std::string source) {
  ConfigFile cfg;
  cfg.source_ = std::move(source);
  std::string raw;
  std::string section;
  int line_no = 0;
  auto where = [&] { return cfg.source_ + ":" + std::to_string(line_no) + ": "; };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where() + "empty section name");
      cfg.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value'");
    if (section.empty()) throw ConfigError(where() + "key outside of any [section]");
    auto key = trim(std::string_view(line).substr(0, eq));
    auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(where() + "empty key");
    auto& slot = cfg.sections_[section];
    if (slot.count(key)) {
      throw ConfigError(where() + "duplicate key '" + section + "." + key + "'");
    }
    slot.emplace(std::move(key), Entry{std::move(value), line_no});
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

const ConfigFile::Entry* ConfigFile::find(const std::string& section,
                                          const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

std::vector<std::pair<std::string, std::string>> ConfigFile::keys() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [section, entries] : sections_) {
    if (entries.empty()) out.emplace_back(section, std::string());
    for (const auto& [key, entry] : entries) out.emplace_back(section, key);
  }
  return out;
}

const ConfigFile::Entry* ConfigReader::lookup(const std::string& section, const std::string& key) {
  used_.emplace(section, key);
  used_.emplace(section, std::string());
  return file_.find(section, key);
}

void ConfigReader::fail(const std::string& section, const std::string& key,
                        const std::string& message) const {
  const auto* e = file_.find(section, key);
  const std::string where = e ? file_.source() + ":" + std::to_string(e->line) + ": "
                              : file_.source() + ": ";
  throw ConfigError(where + section + "." + key + ": " + message);
}

std::optional<std::string> ConfigReader::text(const std::string& section, const std::string& key) {
  const auto* e = lookup(section, key);
  if (!e) return std::nullopt;
  if (e->value.empty()) fail(section, key, "empty value");
  return e->value;
}

std::string ConfigReader::text_or(const std::string& section, const std::string& key,
                                  std::string fallback) {
  auto v = text(section, key);
  return v ? *v : std::move(fallback);
}

std::optional<double> ConfigReader::real(const std::string& section, const std::string& key) {
  const auto t = text(section, key);
  if (!t) return std::nullopt;
  const auto v = to_double(*t);
  if (!v) fail(section, key, "'" + *t + "' is not a finite number");
  return v;
}

double ConfigReader::real_or(const std::string& section, const std::string& key, double fallback) {
  return real(section, key).value_or(fallback);
}

std::optional<std::int64_t> ConfigReader::integer(const std::string& section,
                                                  const std::string& key) {
  const auto t = text(section, key);
  if (!t) return std::nullopt;
  std::int64_t v = 0;
  const char* end = t->data() + t->size();
  auto [ptr, ec] = std::from_chars(t->data(), end, v);
  if (ec != std::errc() || ptr != end) fail(section, key, "'" + *t + "' is not an integer");
  return v;
}

std::int64_t ConfigReader::integer_or(const std::string& section, const std::string& key,
                                      std::int64_t fallback) {
  return integer(section, key).value_or(fallback);
}

std::optional<std::vector<double>> ConfigReader::reals(const std::string& section,
                                                       const std::string& key) {
  const auto t = text(section, key);
  if (!t) return std::nullopt;
  try {
    return parse_real_list(*t);
  } catch (const ConfigError& e) {
    fail(section, key, e.what());
  }
}

std::optional<std::vector<std::string>> ConfigReader::words(const std::string& section,
                                                            const std::string& key) {
  const auto t = text(section, key);
  if (!t) return std::nullopt;
  auto parts = split(*t, ',');
  for (const auto& p : parts) {
    if (p.empty()) fail(section, key, "empty list element");
  }
  return parts;
}

void ConfigReader::finish() const {
  std::string unknown;
  for (const auto& [section, key] : file_.keys()) {
    if (used_.count({section, key})) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += key.empty() ? "[" + section + "]" : section + "." + key;
  }
  if (!unknown.empty()) throw ConfigError(file_.source() + ": unknown keys: " + unknown);
}

}  // namespace dbp::cli
