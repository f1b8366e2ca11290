/*
 * Copyright 2026 The bipex Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BIPEX_CONFIG_H_
#define BIPEX_CONFIG_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace bipex {

// Flat key-value configuration.
//
//   # comment
//   key = value
//   design.kind = cluster
//
// Keys are dotted identifiers, values run to end of line with surrounding
// whitespace trimmed. Repeated keys are an error.
class KeyValueConfig {
 public:
  static KeyValueConfig Parse(std::istream& in);
  static KeyValueConfig Load(const std::string& path);

  bool Has(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<std::string> Get(const std::string& key) const;
  std::optional<double> GetDouble(const std::string& key) const;
  std::optional<std::uint64_t> GetUnsigned(const std::string& key) const;

  void Set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace bipex

#endif  // BIPEX_CONFIG_H_
