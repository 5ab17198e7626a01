// Copyright 2026 The LookAhead Transducer Authors.
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

#ifndef LAT_CONFIG_HPP_
#define LAT_CONFIG_HPP_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>

namespace lat {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plain-text `key = value` settings. Keys are dotted (`lookahead.w`); a
// `[section]` line prefixes the keys that follow it. `#` starts a comment.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(const std::string& text);
  static KeyValueConfig Load(const std::filesystem::path& path);

  void Set(const std::string& key, const std::string& value) { entries_[key] = value; }
  bool Has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string GetString(const std::string& key, const std::string& fallback) const;
  std::string RequireString(const std::string& key) const;
  long long GetInt(const std::string& key, long long fallback) const;
  std::size_t GetSize(const std::string& key, std::size_t fallback) const;
  double GetDouble(const std::string& key, double fallback) const;
  bool GetBool(const std::string& key, bool fallback) const;

  // Sorted `key = value` lines; parses back to the same config.
  std::string ToString() const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace lat

#endif  // LAT_CONFIG_HPP_
