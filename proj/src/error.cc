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

#include "bipex/error.h"

namespace bipex {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kBadWeight: return "BadWeight";
    case ErrorCode::kIndexError: return "IndexError";
    case ErrorCode::kBadDesign: return "BadDesign";
    case ErrorCode::kDegenerateExposure: return "DegenerateExposure";
    case ErrorCode::kEmptyPanel: return "EmptyPanel";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kBadAlpha: return "BadAlpha";
    case ErrorCode::kBadReplicateCount: return "BadReplicateCount";
    case ErrorCode::kMissingCovariates: return "MissingCovariates";
    case ErrorCode::kMissingOutcome: return "MissingOutcome";
    case ErrorCode::kUnknownUnit: return "UnknownUnit";
    case ErrorCode::kDuplicateUnit: return "DuplicateUnit";
    case ErrorCode::kMissingAssignment: return "MissingAssignment";
    case ErrorCode::kMissingCluster: return "MissingCluster";
    case ErrorCode::kBadDegree: return "BadDegree";
    case ErrorCode::kUnknownScenario: return "UnknownScenario";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace bipex
