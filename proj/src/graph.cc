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

#include "bipex/graph.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "bipex/error.h"

namespace bipex {
namespace {

void CheckWeight(double w, std::string_view where) {
  if (!std::isfinite(w) || w <= 0.0) {
    throw Error(ErrorCode::kBadWeight,
                "edge " + std::string(where) + " has weight " +
                    std::to_string(w) + "; weights must be finite and positive");
  }
}

UnitIndex Intern(std::unordered_map<std::string, UnitIndex>& lookup,
                 std::vector<std::string>& ids, const std::string& id) {
  auto [it, inserted] =
      lookup.emplace(id, static_cast<UnitIndex>(ids.size()));
  if (inserted) ids.push_back(id);
  return it->second;
}

}  // namespace

BipartiteGraph BipartiteGraph::FromEdges(std::span<const EdgeRecord> edges) {
  std::unordered_map<std::string, UnitIndex> analysis_lookup;
  std::unordered_map<std::string, UnitIndex> rand_lookup;
  std::vector<std::string> analysis_ids;
  std::vector<std::string> rand_ids;
  std::vector<std::vector<std::pair<UnitIndex, double>>> rows;

  for (const EdgeRecord& e : edges) {
    if (e.analysis_id.empty() || e.rand_id.empty()) {
      throw Error(ErrorCode::kParseError, "edge with an empty unit id");
    }
    CheckWeight(e.weight, "(" + e.analysis_id + ", " + e.rand_id + ")");
    const UnitIndex i = Intern(analysis_lookup, analysis_ids, e.analysis_id);
    const UnitIndex r = Intern(rand_lookup, rand_ids, e.rand_id);
    if (i == rows.size()) rows.emplace_back();
    rows[i].emplace_back(r, e.weight);
  }
  const std::size_t m = rand_ids.size();
  return FromRows(m, std::move(rows), std::move(analysis_ids),
                  std::move(rand_ids));
}

BipartiteGraph BipartiteGraph::FromRows(
    std::size_t num_rand,
    std::vector<std::vector<std::pair<UnitIndex, double>>> rows,
    std::vector<std::string> analysis_ids, std::vector<std::string> rand_ids) {
  BipartiteGraph g;
  const std::size_t n = rows.size();
  if (analysis_ids.empty() && n > 0) {
    analysis_ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) analysis_ids.push_back("u" + std::to_string(i));
  }
  if (rand_ids.empty() && num_rand > 0) {
    rand_ids.reserve(num_rand);
    for (std::size_t r = 0; r < num_rand; ++r) rand_ids.push_back("g" + std::to_string(r));
  }
  if (analysis_ids.size() != n || rand_ids.size() != num_rand) {
    throw Error(ErrorCode::kLengthMismatch, "id lists do not match graph shape");
  }

  std::size_t total = 0;
  for (const auto& row : rows) total += row.size();
  g.row_offsets_.reserve(n + 1);
  g.rand_index_.reserve(total);
  g.weight_.reserve(total);

  for (std::size_t i = 0; i < n; ++i) {
    auto& row = rows[i];
    std::sort(row.begin(), row.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto [r, w] = row[k];
      if (r >= num_rand) {
        throw Error(ErrorCode::kIndexError,
                    "randomization index " + std::to_string(r) +
                        " out of range for m = " + std::to_string(num_rand));
      }
      if (k > 0 && row[k - 1].first == r) {
        throw Error(ErrorCode::kDuplicateEdge,
                    "duplicate edge (" + analysis_ids[i] + ", " + rand_ids[r] + ")");
      }
      CheckWeight(w, "(" + analysis_ids[i] + ", " + rand_ids[r] + ")");
      g.rand_index_.push_back(r);
      g.weight_.push_back(w);
    }
    g.row_offsets_.push_back(g.rand_index_.size());
    std::vector<std::pair<UnitIndex, double>>().swap(row);
  }
  g.analysis_ids_ = std::move(analysis_ids);
  g.rand_ids_ = std::move(rand_ids);
  g.BuildIndexMaps();
  return g;
}

void BipartiteGraph::BuildIndexMaps() {
  analysis_lookup_.clear();
  rand_lookup_.clear();
  analysis_lookup_.reserve(analysis_ids_.size());
  rand_lookup_.reserve(rand_ids_.size());
  for (std::size_t i = 0; i < analysis_ids_.size(); ++i) {
    if (!analysis_lookup_.emplace(analysis_ids_[i], static_cast<UnitIndex>(i)).second) {
      throw Error(ErrorCode::kDuplicateUnit, "duplicate analysis id " + analysis_ids_[i]);
    }
  }
  for (std::size_t r = 0; r < rand_ids_.size(); ++r) {
    if (!rand_lookup_.emplace(rand_ids_[r], static_cast<UnitIndex>(r)).second) {
      throw Error(ErrorCode::kDuplicateUnit, "duplicate randomization id " + rand_ids_[r]);
    }
  }
}

RowView BipartiteGraph::Row(std::size_t i) const {
  if (i >= num_analysis()) {
    throw Error(ErrorCode::kIndexError,
                "analysis index " + std::to_string(i) + " out of range for n = " +
                    std::to_string(num_analysis()));
  }
  const std::size_t begin = row_offsets_[i];
  const std::size_t len = row_offsets_[i + 1] - begin;
  return {std::span<const UnitIndex>(rand_index_).subspan(begin, len),
          std::span<const double>(weight_).subspan(begin, len)};
}

std::vector<std::pair<UnitIndex, double>> BipartiteGraph::Neighbors(
    std::size_t i) const {
  const RowView row = Row(i);
  std::vector<std::pair<UnitIndex, double>> out;
  out.reserve(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) {
    out.emplace_back(row.rand_index[k], row.weight[k]);
  }
  return out;
}

std::optional<UnitIndex> BipartiteGraph::FindAnalysis(std::string_view id) const {
  auto it = analysis_lookup_.find(std::string(id));
  if (it == analysis_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<UnitIndex> BipartiteGraph::FindRand(std::string_view id) const {
  auto it = rand_lookup_.find(std::string(id));
  if (it == rand_lookup_.end()) return std::nullopt;
  return it->second;
}

double BipartiteGraph::MaxRowSum() const {
  double best = 0.0;
  for (std::size_t i = 0; i < num_analysis(); ++i) {
    double s = 0.0;
    for (std::size_t e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) s += weight_[e];
    best = std::max(best, s);
  }
  return best;
}

std::vector<EdgeRecord> BipartiteGraph::ToEdges() const {
  std::vector<EdgeRecord> out;
  out.reserve(num_edges());
  for (std::size_t i = 0; i < num_analysis(); ++i) {
    for (std::size_t e = row_offsets_[i]; e < row_offsets_[i + 1]; ++e) {
      out.push_back({analysis_ids_[i], rand_ids_[rand_index_[e]], weight_[e]});
    }
  }
  return out;
}

DegreeStats ComputeDegreeStats(const BipartiteGraph& graph) {
  DegreeStats stats;
  const std::size_t n = graph.num_analysis();
  const std::size_t m = graph.num_rand();
  const auto offsets = graph.row_offsets();
  std::vector<std::size_t> rand_degree(m, 0);
  for (std::size_t i = 0; i < n; ++i) {
    stats.max_analysis_degree =
        std::max(stats.max_analysis_degree, offsets[i + 1] - offsets[i]);
  }
  for (UnitIndex r : graph.rand_indices()) ++rand_degree[r];
  for (std::size_t d : rand_degree) stats.max_rand_degree = std::max(stats.max_rand_degree, d);
  stats.edge_count = graph.num_edges();
  stats.d_bar = std::max(stats.max_analysis_degree, stats.max_rand_degree);
  if (n > 0) stats.mean_analysis_degree = static_cast<double>(stats.edge_count) / n;
  if (m > 0) stats.mean_rand_degree = static_cast<double>(stats.edge_count) / m;
  return stats;
}

}  // namespace bipex
