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

#ifndef BIPEX_GRAPH_H_
#define BIPEX_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace bipex {

using UnitIndex = std::uint32_t;

// One row of the edge list as it appears in the input file.
struct EdgeRecord {
  std::string analysis_id;
  std::string rand_id;
  double weight = 1.0;
};

// Read-only view of a single analysis unit's adjacency row.
struct RowView {
  std::span<const UnitIndex> rand_index;
  std::span<const double> weight;

  std::size_t size() const { return rand_index.size(); }
  bool empty() const { return rand_index.empty(); }
};

struct DegreeStats {
  std::size_t max_analysis_degree = 0;
  std::size_t max_rand_degree = 0;
  std::size_t d_bar = 0;
  std::size_t edge_count = 0;
  double mean_analysis_degree = 0.0;
  double mean_rand_degree = 0.0;
};

// Weighted adjacency between n analysis units (rows) and m randomization
// units (columns), stored in compressed sparse row form. Immutable once built.
//
// Stored weights are strictly positive and finite, every (row, column) pair
// appears at most once, and each row is sorted by ascending column index.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;

  // Rows are numbered by first appearance of each analysis id, columns by
  // first appearance of each randomization id.
  static BipartiteGraph FromEdges(std::span<const EdgeRecord> edges);

  // Builds from per-row (column, weight) lists over already-dense indices.
  // Rows are sorted here; ids default to "u<i>" and "g<r>".
  static BipartiteGraph FromRows(
      std::size_t num_rand,
      std::vector<std::vector<std::pair<UnitIndex, double>>> rows,
      std::vector<std::string> analysis_ids = {},
      std::vector<std::string> rand_ids = {});

  std::size_t num_analysis() const { return analysis_ids_.size(); }
  std::size_t num_rand() const { return rand_ids_.size(); }
  std::size_t num_edges() const { return rand_index_.size(); }

  // Throws IndexError when i is out of range.
  RowView Row(std::size_t i) const;
  std::vector<std::pair<UnitIndex, double>> Neighbors(std::size_t i) const;

  // Unchecked access for hot loops.
  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const UnitIndex> rand_indices() const { return rand_index_; }
  std::span<const double> weights() const { return weight_; }

  const std::vector<std::string>& analysis_ids() const { return analysis_ids_; }
  const std::vector<std::string>& rand_ids() const { return rand_ids_; }
  std::optional<UnitIndex> FindAnalysis(std::string_view id) const;
  std::optional<UnitIndex> FindRand(std::string_view id) const;

  // Largest row sum of weights; above 1 the exposures leave [0, 1].
  double MaxRowSum() const;

  // Back to the edge-list representation, in row-major storage order.
  std::vector<EdgeRecord> ToEdges() const;

 private:
  void BuildIndexMaps();

  std::vector<std::size_t> row_offsets_{0};
  std::vector<UnitIndex> rand_index_;
  std::vector<double> weight_;
  std::vector<std::string> analysis_ids_;
  std::vector<std::string> rand_ids_;
  std::unordered_map<std::string, UnitIndex> analysis_lookup_;
  std::unordered_map<std::string, UnitIndex> rand_lookup_;
};

DegreeStats ComputeDegreeStats(const BipartiteGraph& graph);

}  // namespace bipex

#endif  // BIPEX_GRAPH_H_
