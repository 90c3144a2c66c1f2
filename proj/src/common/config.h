/*
 * Copyright 2026 The mabr-sim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MABR_COMMON_CONFIG_H_
#define MABR_COMMON_CONFIG_H_

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace mabr {

// Flat key=value configuration. Every key must be registered in the schema
// (config.cc); setting an unknown key is an error that lists the offenders.
// Values are stored as strings and parsed on access.
//
// File format: one `key = value` per line, `#` starts a comment, blank lines
// ignored.
class Config {
 public:
  // All keys at their registered defaults.
  Config();

  // Defaults overlaid with the file's entries.
  static Config FromFile(const std::string& path);

  // Applies overrides of the form "key=value"; used for CLI --set flags.
  void ApplyOverride(const std::string& key_equals_value);
  void Set(const std::string& key, const std::string& value);

  double GetDouble(const std::string& key) const;
  int GetInt(const std::string& key) const;
  const std::string& GetString(const std::string& key) const;
  std::vector<double> GetDoubleList(const std::string& key) const;  // comma-separated

  // Writes every key (sorted) as `key = value`; the run-directory snapshot.
  void Write(std::ostream& out) const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace mabr

#endif  // MABR_COMMON_CONFIG_H_
