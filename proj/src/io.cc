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

#include "bipex/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>

#include "bipex/error.h"

namespace bipex {
namespace {

std::vector<std::string_view> SplitTabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

[[noreturn]] void Fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + what);
}

std::optional<double> ParseNumber(std::string_view text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

// Calls visit(fields, line_no) for every non-blank line.
template <typename Visitor>
void ForEachRow(std::istream& in, Visitor&& visit) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    visit(SplitTabs(line), line_no);
  }
}

void RequireFieldCount(const std::vector<std::string_view>& fields, std::size_t lo,
                       std::size_t hi, std::size_t line_no) {
  if (fields.size() < lo || fields.size() > hi) {
    Fail(line_no, "expected " + std::to_string(lo) +
                      (lo == hi ? "" : "-" + std::to_string(hi)) + " tab-separated fields, got " +
                      std::to_string(fields.size()));
  }
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (fields[k].empty()) Fail(line_no, "empty field " + std::to_string(k + 1));
  }
}

// Optional header: the first row is a header when its numeric column does
// not parse.
bool IsHeader(const std::vector<std::string_view>& fields, bool first_row) {
  return first_row && fields.size() >= 2 && !ParseNumber(fields[1]);
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::ifstream OpenInput(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open '" + path + "'");
  return in;
}

std::vector<EdgeRecord> ReadEdgeList(std::istream& in) {
  std::vector<EdgeRecord> edges;
  bool seen_header = false;
  ForEachRow(in, [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (!seen_header) {
      const bool ok = fields.size() >= 2 && fields.size() <= 3 &&
                      fields[0] == "analysis_id" && fields[1] == "rand_id" &&
                      (fields.size() == 2 || fields[2] == "weight");
      if (!ok) Fail(line_no, "expected header 'analysis_id\\trand_id\\tweight'");
      seen_header = true;
      return;
    }
    RequireFieldCount(fields, 2, 3, line_no);
    double weight = 1.0;
    if (fields.size() == 3) {
      const auto w = ParseNumber(fields[2]);
      if (!w) Fail(line_no, "weight '" + std::string(fields[2]) + "' is not a number");
      weight = *w;
    }
    edges.push_back({std::string(fields[0]), std::string(fields[1]), weight});
  });
  if (!seen_header) Fail(1, "missing header 'analysis_id\\trand_id\\tweight'");
  return edges;
}

void WriteEdgeList(const BipartiteGraph& graph, std::ostream& out) {
  out << "analysis_id\trand_id\tweight\n";
  const auto offsets = graph.row_offsets();
  const auto cols = graph.rand_indices();
  const auto weights = graph.weights();
  const auto& aid = graph.analysis_ids();
  const auto& rid = graph.rand_ids();
  for (std::size_t i = 0; i < graph.num_analysis(); ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      out << aid[i] << '\t' << rid[cols[e]] << '\t' << FormatDouble(weights[e]) << '\n';
    }
  }
}

std::vector<OutcomeRow> ReadOutcomes(std::istream& in) {
  std::vector<OutcomeRow> rows;
  std::optional<std::size_t> width;
  bool first = true;
  ForEachRow(in, [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (IsHeader(fields, first)) {
      first = false;
      return;
    }
    first = false;
    RequireFieldCount(fields, 2, 3, line_no);
    if (width && *width != fields.size()) {
      Fail(line_no, "covariate column present on some rows but not others");
    }
    width = fields.size();
    OutcomeRow row;
    row.analysis_id = std::string(fields[0]);
    const auto y = ParseNumber(fields[1]);
    if (!y || !std::isfinite(*y)) Fail(line_no, "outcome is not a finite number");
    row.y = *y;
    if (fields.size() == 3) {
      const auto f = ParseNumber(fields[2]);
      if (!f || !std::isfinite(*f)) Fail(line_no, "covariate is not a finite number");
      row.f = *f;
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

std::vector<AssignmentRow> ReadAssignments(std::istream& in) {
  std::vector<AssignmentRow> rows;
  bool first = true;
  ForEachRow(in, [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (IsHeader(fields, first)) {
      first = false;
      return;
    }
    first = false;
    RequireFieldCount(fields, 2, 2, line_no);
    if (fields[1] != "0" && fields[1] != "1") Fail(line_no, "assignment must be 0 or 1");
    rows.push_back({std::string(fields[0]), fields[1] == "1"});
  });
  return rows;
}

std::vector<ClusterRow> ReadClusters(std::istream& in) {
  std::vector<ClusterRow> rows;
  bool first = true;
  ForEachRow(in, [&](const std::vector<std::string_view>& fields, std::size_t line_no) {
    if (first && fields.size() == 2 && fields[0] == "rand_id" && fields[1] == "cluster_id") {
      first = false;
      return;
    }
    first = false;
    RequireFieldCount(fields, 2, 2, line_no);
    rows.push_back({std::string(fields[0]), std::string(fields[1])});
  });
  return rows;
}

OutcomePanel AlignOutcomes(const BipartiteGraph& graph,
                           const std::vector<OutcomeRow>& rows) {
  const std::size_t n = graph.num_analysis();
  const bool with_f = !rows.empty() && rows.front().f.has_value();
  OutcomePanel panel;
  panel.y.assign(n, 0.0);
  if (with_f) panel.f.emplace(n, 0.0);
  std::vector<char> seen(n, 0);
  for (const OutcomeRow& row : rows) {
    const auto i = graph.FindAnalysis(row.analysis_id);
    if (!i) {
      throw Error(ErrorCode::kUnknownUnit,
                  "outcome for analysis unit '" + row.analysis_id + "' not in the graph");
    }
    if (seen[*i]) {
      throw Error(ErrorCode::kDuplicateUnit,
                  "analysis unit '" + row.analysis_id + "' appears twice in outcomes");
    }
    seen[*i] = 1;
    panel.y[*i] = row.y;
    if (with_f) (*panel.f)[*i] = *row.f;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen[i]) {
      throw Error(ErrorCode::kMissingOutcome,
                  "no outcome for analysis unit '" + graph.analysis_ids()[i] + "'");
    }
  }
  return panel;
}

std::vector<double> AlignAssignment(const BipartiteGraph& graph,
                                    const std::vector<AssignmentRow>& rows) {
  const std::size_t m = graph.num_rand();
  std::vector<double> z(m, 0.0);
  std::vector<char> seen(m, 0);
  for (const AssignmentRow& row : rows) {
    const auto r = graph.FindRand(row.rand_id);
    if (!r) {
      throw Error(ErrorCode::kUnknownUnit,
                  "assignment for randomization unit '" + row.rand_id + "' not in the graph");
    }
    if (seen[*r]) {
      throw Error(ErrorCode::kDuplicateUnit,
                  "randomization unit '" + row.rand_id + "' assigned twice");
    }
    seen[*r] = 1;
    z[*r] = row.treated ? 1.0 : 0.0;
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (!seen[r]) {
      throw Error(ErrorCode::kMissingAssignment,
                  "no assignment for randomization unit '" + graph.rand_ids()[r] + "'");
    }
  }
  return z;
}

std::vector<std::uint64_t> AlignClusters(const BipartiteGraph& graph,
                                         const std::vector<ClusterRow>& rows) {
  const std::size_t m = graph.num_rand();
  std::vector<std::uint64_t> labels(m, 0);
  std::vector<char> seen(m, 0);
  std::unordered_map<std::string, std::uint64_t> intern;
  for (const ClusterRow& row : rows) {
    const auto r = graph.FindRand(row.rand_id);
    if (!r) {
      throw Error(ErrorCode::kUnknownUnit,
                  "cluster for randomization unit '" + row.rand_id + "' not in the graph");
    }
    if (seen[*r]) {
      throw Error(ErrorCode::kDuplicateUnit,
                  "randomization unit '" + row.rand_id + "' has two clusters");
    }
    seen[*r] = 1;
    labels[*r] = intern.emplace(row.cluster_id, intern.size()).first->second;
  }
  for (std::size_t r = 0; r < m; ++r) {
    if (!seen[r]) {
      throw Error(ErrorCode::kMissingCluster,
                  "no cluster for randomization unit '" + graph.rand_ids()[r] + "'");
    }
  }
  return labels;
}

}  // namespace bipex
