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

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "bipex/config.h"
#include "bipex/error.h"
#include "bipex/graph.h"

namespace bipex {
namespace {

Error Caught(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no bipex::Error thrown";
  return Error(ErrorCode::kIoError, "none");
}

template <typename Reader>
auto ReadText(Reader reader, const std::string& text) {
  std::istringstream in(text);
  return reader(in);
}

TEST(ReadEdgeListTest, WeightsOptional) {
  const auto edges = ReadText(ReadEdgeList, "analysis_id\trand_id\tweight\nu1\tg1\t0.25\nu1\tg2\n\nu2\tg1\t1e-1\r\n");
  ASSERT_EQ(edges.size(), 3u);
  EXPECT_EQ(edges[0].analysis_id, "u1");
  EXPECT_EQ(edges[0].rand_id, "g1");
  EXPECT_EQ(edges[0].weight, 0.25);
  EXPECT_EQ(edges[1].weight, 1.0);
  EXPECT_EQ(edges[2].weight, 0.1);
  const auto two = ReadText(ReadEdgeList, "analysis_id\trand_id\nu1\tg1\n");
  EXPECT_EQ(two[0].weight, 1.0);
}

TEST(ReadEdgeListTest, ErrorsCarryLineNumbers) {
  const Error no_header = Caught([] { ReadText(ReadEdgeList, "u1\tg1\t1\n"); });
  EXPECT_EQ(no_header.code(), ErrorCode::kParseError);
  EXPECT_NE(std::string(no_header.what()).find("line 1"), std::string::npos);

  const Error bad_weight =
      Caught([] { ReadText(ReadEdgeList, "analysis_id\trand_id\tweight\nu1\tg1\t1\nu2\tg1\tabc\n"); });
  EXPECT_EQ(bad_weight.code(), ErrorCode::kParseError);
  EXPECT_NE(std::string(bad_weight.what()).find("line 3"), std::string::npos);

  const Error fields =
      Caught([] { ReadText(ReadEdgeList, "analysis_id\trand_id\tweight\nu1\n"); });
  EXPECT_NE(std::string(fields.what()).find("line 2"), std::string::npos);

  EXPECT_EQ(Caught([] { ReadText(ReadEdgeList, ""); }).code(), ErrorCode::kParseError);
}

TEST(ReadEdgeListTest, NegativeWeightRejectedAtBuild) {
  const auto edges = ReadText(ReadEdgeList, "analysis_id\trand_id\tweight\nu1\tg1\t-1\n");
  EXPECT_EQ(Caught([&] { BipartiteGraph::FromEdges(edges); }).code(), ErrorCode::kBadWeight);
}

TEST(WriteEdgeListTest, RoundTripsExactly) {
  const std::vector<EdgeRecord> edges = {
      {"a", "x", 0.1}, {"a", "y", 1.0 / 3}, {"b", "y", 2.5e-17}, {"c", "z", 1.0}};
  const auto g = BipartiteGraph::FromEdges(edges);
  std::ostringstream out;
  WriteEdgeList(g, out);
  const auto back = ReadText(ReadEdgeList, out.str());
  ASSERT_EQ(back.size(), edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    EXPECT_EQ(back[e].analysis_id, edges[e].analysis_id);
    EXPECT_EQ(back[e].rand_id, edges[e].rand_id);
    EXPECT_EQ(back[e].weight, edges[e].weight);
  }
}

TEST(FormatDoubleTest, ShortestRoundTrip) {
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(FormatDouble(1.0), "1");
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  const double third = 1.0 / 3;
  EXPECT_EQ(std::stod(FormatDouble(third)), third);
}

TEST(ReadOutcomesTest, HeaderAndCovariate) {
  const auto rows = ReadText(ReadOutcomes, "analysis_id\ty\tf\nu1\t1.5\t2\nu2\t-3\t0\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].y, 1.5);
  EXPECT_EQ(*rows[0].f, 2.0);
  const auto plain = ReadText(ReadOutcomes, "u1\t1.5\n");
  ASSERT_EQ(plain.size(), 1u);
  EXPECT_FALSE(plain[0].f.has_value());
}

TEST(ReadOutcomesTest, Errors) {
  const Error mixed = Caught([] { ReadText(ReadOutcomes, "u1\t1\t2\nu2\t3\n"); });
  EXPECT_EQ(mixed.code(), ErrorCode::kParseError);
  EXPECT_NE(std::string(mixed.what()).find("line 2"), std::string::npos);
  EXPECT_EQ(Caught([] { ReadText(ReadOutcomes, "u1\t1\nu2\tnan\n"); }).code(),
            ErrorCode::kParseError);
  EXPECT_EQ(Caught([] { ReadText(ReadOutcomes, "u1\t1\nu2\tx\n"); }).code(),
            ErrorCode::kParseError);
}

TEST(ReadAssignmentsTest, ParsesBits) {
  const auto rows = ReadText(ReadAssignments, "rand_id\tz\ng1\t1\ng2\t0\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].treated);
  EXPECT_FALSE(rows[1].treated);
  const Error bad = Caught([] { ReadText(ReadAssignments, "g1\t1\ng2\t2\n"); });
  EXPECT_EQ(bad.code(), ErrorCode::kParseError);
  EXPECT_NE(std::string(bad.what()).find("line 2"), std::string::npos);
}

TEST(ReadClustersTest, ParsesLabels) {
  const auto rows = ReadText(ReadClusters, "rand_id\tcluster_id\ng1\tc1\ng2\tc1\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].cluster_id, "c1");
  EXPECT_EQ(ReadText(ReadClusters, "g1\tc1\n").size(), 1u);
}

BipartiteGraph SmallGraph() {
  return BipartiteGraph::FromEdges(std::vector<EdgeRecord>{
      {"u1", "g1", 1.0}, {"u2", "g1", 0.5}, {"u2", "g2", 0.5}});
}

TEST(AlignTest, OutcomesByIdentifier) {
  const auto g = SmallGraph();
  const auto panel = AlignOutcomes(g, {{"u2", 4.0, 1.0}, {"u1", 3.0, 2.0}});
  EXPECT_EQ(panel.y, (std::vector<double>{3.0, 4.0}));
  EXPECT_EQ(*panel.f, (std::vector<double>{2.0, 1.0}));
  EXPECT_EQ(Caught([&] { AlignOutcomes(g, {{"u1", 1.0, {}}}); }).code(),
            ErrorCode::kMissingOutcome);
  EXPECT_EQ(Caught([&] { AlignOutcomes(g, {{"u1", 1.0, {}}, {"u2", 1.0, {}}, {"u9", 1.0, {}}}); })
                .code(),
            ErrorCode::kUnknownUnit);
  EXPECT_EQ(Caught([&] { AlignOutcomes(g, {{"u1", 1.0, {}}, {"u1", 1.0, {}}, {"u2", 1.0, {}}}); })
                .code(),
            ErrorCode::kDuplicateUnit);
}

TEST(AlignTest, AssignmentAndClusters) {
  const auto g = SmallGraph();
  EXPECT_EQ(AlignAssignment(g, {{"g2", true}, {"g1", false}}), (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(Caught([&] { AlignAssignment(g, {{"g1", true}}); }).code(),
            ErrorCode::kMissingAssignment);
  EXPECT_EQ(Caught([&] { AlignAssignment(g, {{"g1", true}, {"g2", true}, {"g3", true}}); }).code(),
            ErrorCode::kUnknownUnit);
  const auto labels = AlignClusters(g, {{"g1", "a"}, {"g2", "b"}});
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_NE(labels[0], labels[1]);
  const auto same = AlignClusters(g, {{"g1", "a"}, {"g2", "a"}});
  EXPECT_EQ(same[0], same[1]);
  EXPECT_EQ(Caught([&] { AlignClusters(g, {{"g1", "a"}}); }).code(), ErrorCode::kMissingCluster);
}

TEST(OpenInputTest, MissingFile) {
  EXPECT_EQ(Caught([] { OpenInput("/nonexistent/path.tsv"); }).code(), ErrorCode::kIoError);
}

TEST(KeyValueConfigTest, ParsesAndRejects) {
  std::istringstream in("# comment\nk = 5\nalpha=0.1  # trailing\n\nmethods = rv,sn\n");
  const auto cfg = KeyValueConfig::Parse(in);
  EXPECT_EQ(*cfg.GetUnsigned("k"), 5u);
  EXPECT_EQ(*cfg.GetDouble("alpha"), 0.1);
  EXPECT_EQ(*cfg.Get("methods"), "rv,sn");
  EXPECT_FALSE(cfg.Get("missing").has_value());

  std::istringstream dup("k = 1\nk = 2\n");
  EXPECT_EQ(Caught([&] { KeyValueConfig::Parse(dup); }).code(), ErrorCode::kBadConfig);
  std::istringstream no_eq("k 1\n");
  EXPECT_EQ(Caught([&] { KeyValueConfig::Parse(no_eq); }).code(), ErrorCode::kBadConfig);
  std::istringstream not_num("k = x\n");
  const auto bad = KeyValueConfig::Parse(not_num);
  EXPECT_EQ(Caught([&] { bad.GetUnsigned("k"); }).code(), ErrorCode::kBadConfig);
  EXPECT_EQ(Caught([&] { bad.GetDouble("k"); }).code(), ErrorCode::kBadConfig);
}

}  // namespace
}  // namespace bipex
