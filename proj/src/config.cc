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

#include "bipex/config.h"

#include <charconv>
#include <fstream>
#include <istream>

#include "bipex/error.h"

namespace bipex {
namespace {

std::string Trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool IsKeyChar(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '.' || c == '-';
}

}  // namespace

KeyValueConfig KeyValueConfig::Parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string body = Trim(line);
    // A '#' after whitespace starts a trailing comment.
    for (std::size_t k = 1; k < body.size(); ++k) {
      if (body[k] == '#' && (body[k - 1] == ' ' || body[k - 1] == '\t')) {
        body = Trim(body.substr(0, k));
        break;
      }
    }
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kBadConfig,
                  "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = Trim(body.substr(0, eq));
    const std::string value = Trim(body.substr(eq + 1));
    if (key.empty()) {
      throw Error(ErrorCode::kBadConfig, "config line " + std::to_string(line_no) + ": empty key");
    }
    for (char c : key) {
      if (!IsKeyChar(c)) {
        throw Error(ErrorCode::kBadConfig, "config line " + std::to_string(line_no) +
                                               ": invalid key '" + key + "'");
      }
    }
    if (!cfg.values_.emplace(key, value).second) {
      throw Error(ErrorCode::kBadConfig, "config line " + std::to_string(line_no) +
                                             ": key '" + key + "' repeated");
    }
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open config '" + path + "'");
  return Parse(in);
}

std::optional<std::string> KeyValueConfig::Get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> KeyValueConfig::GetDouble(const std::string& key) const {
  const auto raw = Get(key);
  if (!raw) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), v);
  if (ec != std::errc() || ptr != raw->data() + raw->size() || raw->empty()) {
    throw Error(ErrorCode::kBadConfig, "config key '" + key + "' is not a number: " + *raw);
  }
  return v;
}

std::optional<std::uint64_t> KeyValueConfig::GetUnsigned(const std::string& key) const {
  const auto raw = Get(key);
  if (!raw) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), v);
  if (ec != std::errc() || ptr != raw->data() + raw->size() || raw->empty()) {
    throw Error(ErrorCode::kBadConfig,
                "config key '" + key + "' is not a nonnegative integer: " + *raw);
  }
  return v;
}

}  // namespace bipex
