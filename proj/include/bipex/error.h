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

#ifndef BIPEX_ERROR_H_
#define BIPEX_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace bipex {

// Every failure the library can report. The CLI prints the code name as a
// machine-parsable prefix, so names are part of the external interface.
enum class ErrorCode {
  kDuplicateEdge,
  kBadWeight,
  kIndexError,
  kBadDesign,
  kDegenerateExposure,
  kEmptyPanel,
  kLengthMismatch,
  kBadAlpha,
  kBadReplicateCount,
  kMissingCovariates,
  kMissingOutcome,
  kUnknownUnit,
  kDuplicateUnit,
  kMissingAssignment,
  kMissingCluster,
  kBadDegree,
  kUnknownScenario,
  kBadConfig,
  kParseError,
  kIoError,
};

std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bipex

#endif  // BIPEX_ERROR_H_
