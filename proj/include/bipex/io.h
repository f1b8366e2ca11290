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

#ifndef BIPEX_IO_H_
#define BIPEX_IO_H_

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bipex/estimator.h"
#include "bipex/graph.h"

namespace bipex {

// Tab-separated input files. All readers stream line by line and report
// ParseError with the 1-based line number.
//
//   edge list    analysis_id  rand_id  [weight]   (header required)
//   outcomes     analysis_id  y  [f]              (header optional)
//   assignments  rand_id  z                       (z in {0, 1}; header optional)
//   clusters     rand_id  cluster_id              (header optional)

std::vector<EdgeRecord> ReadEdgeList(std::istream& in);
void WriteEdgeList(const BipartiteGraph& graph, std::ostream& out);

struct OutcomeRow {
  std::string analysis_id;
  double y = 0.0;
  std::optional<double> f;
};
std::vector<OutcomeRow> ReadOutcomes(std::istream& in);

struct AssignmentRow {
  std::string rand_id;
  bool treated = false;
};
std::vector<AssignmentRow> ReadAssignments(std::istream& in);

struct ClusterRow {
  std::string rand_id;
  std::string cluster_id;
};
std::vector<ClusterRow> ReadClusters(std::istream& in);

// Matching rows to graph indices. Ids absent from the graph raise
// UnknownUnit; graph units without a row raise MissingOutcome /
// MissingAssignment / MissingCluster.
OutcomePanel AlignOutcomes(const BipartiteGraph& graph,
                           const std::vector<OutcomeRow>& rows);
std::vector<double> AlignAssignment(const BipartiteGraph& graph,
                                    const std::vector<AssignmentRow>& rows);
std::vector<std::uint64_t> AlignClusters(const BipartiteGraph& graph,
                                         const std::vector<ClusterRow>& rows);

// Opens path for reading or throws IoError.
std::ifstream OpenInput(const std::string& path);

// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double value);

}  // namespace bipex

#endif  // BIPEX_IO_H_
