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

#include "bipex/simulation.h"

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "bipex/error.h"
#include "bipex/numeric.h"
#include "oracle.h"

namespace bipex {
namespace {

ErrorCode CodeOf(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no bipex::Error thrown";
  return ErrorCode::kIoError;
}

double RowSum(const BipartiteGraph& g, std::size_t i) {
  return CompensatedTotal(g.Row(i).weight);
}

TEST(GenerateGraphTest, FullDegree) {
  const auto g = GenerateUniformBipartiteGraph(4, 2, 2, 1);
  EXPECT_EQ(g.num_analysis(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto row = g.Row(i);
    ASSERT_EQ(row.size(), 2u);
    EXPECT_EQ(std::set<UnitIndex>(row.rand_index.begin(), row.rand_index.end()).size(), 2u);
    for (double w : row.weight) EXPECT_EQ(w, 0.5);
  }
  EXPECT_EQ(ComputeDegreeStats(g).max_analysis_degree, 2u);
}

TEST(GenerateGraphTest, DegreeOne) {
  const auto g = GenerateUniformBipartiteGraph(50, 20, 1, 2);
  for (std::size_t i = 0; i < 50; ++i) {
    ASSERT_EQ(g.Row(i).size(), 1u);
    EXPECT_EQ(g.Row(i).weight[0], 1.0);
  }
}

TEST(GenerateGraphTest, SparseShape) {
  const auto g = GenerateUniformBipartiteGraph(1000, 500, 5, 3);
  for (std::size_t i = 0; i < 1000; ++i) {
    ASSERT_EQ(g.Row(i).size(), 5u);
    EXPECT_EQ(RowSum(g, i), 1.0);
  }
  std::vector<std::size_t> rand_degree(500, 0);
  for (std::size_t i = 0; i < 1000; ++i) {
    for (UnitIndex r : g.Row(i).rand_index) ++rand_degree[r];
  }
  const double mean = CompensatedTotal(std::vector<double>(rand_degree.begin(), rand_degree.end())) / 500;
  EXPECT_NEAR(mean / 10.0, 1.0, 0.05);
  const auto stats = ComputeDegreeStats(g);
  EXPECT_EQ(stats.max_analysis_degree, 5u);
  EXPECT_GE(stats.max_rand_degree, 10u);
}

TEST(GenerateGraphTest, UniformRandomizationSideMarginal) {
  // Each rand unit is picked by a unit with probability d/m; the chi-square
  // of the degree counts stays within a loose bound.
  const std::size_t n = 20000, m = 50, d = 3;
  const auto g = GenerateUniformBipartiteGraph(n, m, d, 4);
  std::vector<double> count(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (UnitIndex r : g.Row(i).rand_index) count[r] += 1.0;
  }
  const double expected = static_cast<double>(n * d) / m;
  double chi2 = 0.0;
  for (double c : count) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 100.0);  // 49 dof; P(chi2 > 100) < 1e-4
}

TEST(GenerateGraphTest, DeterministicAndSeedSensitive) {
  const auto a = GenerateUniformBipartiteGraph(100, 40, 4, 9);
  const auto b = GenerateUniformBipartiteGraph(100, 40, 4, 9);
  const auto c = GenerateUniformBipartiteGraph(100, 40, 4, 10);
  EXPECT_TRUE(std::ranges::equal(a.rand_indices(), b.rand_indices()));
  EXPECT_FALSE(std::ranges::equal(a.rand_indices(), c.rand_indices()));
}

TEST(GenerateGraphTest, BadDegree) {
  EXPECT_EQ(CodeOf([] { GenerateUniformBipartiteGraph(10, 5, 6, 0); }), ErrorCode::kBadDegree);
  EXPECT_EQ(CodeOf([] { GenerateUniformBipartiteGraph(10, 5, 0, 0); }), ErrorCode::kBadDegree);
}

TEST(OutcomeModelTest, DegenerateUniform) {
  ScenarioSpec spec;
  spec.n = 30;
  spec.a0 = 2.0;
  spec.a1 = 0.0;
  spec.b0 = -1.5;
  spec.b1 = 0.0;
  const auto t = DrawOutcomeModel(spec, 1);
  for (std::size_t i = 0; i < spec.n; ++i) {
    EXPECT_EQ(t.alpha[i], 2.0);
    EXPECT_EQ(t.beta[i], -1.5);
  }
  EXPECT_EQ(t.tau_true, -1.5);
}

TEST(OutcomeModelTest, PresetRanges) {
  ScenarioSpec s1 = ScenarioPreset("S1");
  s1.n = 1000;
  const auto t1 = DrawOutcomeModel(s1, 2);
  for (std::size_t i = 0; i < s1.n; ++i) {
    EXPECT_GE(t1.alpha[i], 5.0);
    EXPECT_LE(t1.alpha[i], 7.0);
    EXPECT_GE(t1.beta[i], -1.0);
    EXPECT_LE(t1.beta[i], 1.0);
  }
  EXPECT_LT(std::fabs(t1.tau_true), 3.0 / std::sqrt(3.0 * s1.n));

  ScenarioSpec s2 = ScenarioPreset("S2");
  s2.n = 1000;
  const auto t2 = DrawOutcomeModel(s2, 3);
  const double sd_mean = 700.0 / std::sqrt(12.0 * s2.n);
  EXPECT_NEAR(t2.tau_true, 450.0, 4 * sd_mean);
  EXPECT_EQ(t2.tau_true, CompensatedTotal(t2.beta) / s2.n);
}

TEST(SimulateOutcomesTest, NoiselessIsLinearInExposure) {
  ScenarioSpec spec = ScenarioPreset("S2");
  spec.n = 50;
  const auto g = GenerateUniformBipartiteGraph(50, 20, 4, 5);
  const auto t = DrawOutcomeModel(spec, 6);
  std::vector<double> z(20);
  for (std::size_t r = 0; r < 20; ++r) z[r] = r % 3 == 0;
  const auto panel = SimulateOutcomes(g, t, z, 0.0, 7);
  EXPECT_FALSE(panel.has_covariate());
  for (std::size_t i = 0; i < 50; ++i) {
    double h = 0.0;
    const auto row = g.Row(i);
    for (std::size_t e = 0; e < row.size(); ++e) h += row.weight[e] * z[row.rand_index[e]];
    EXPECT_NEAR(panel.y[i], t.alpha[i] + t.beta[i] * h, 1e-12);
  }
}

TEST(SimulateOutcomesTest, TreatAllMinusControlAllIsBeta) {
  ScenarioSpec spec = ScenarioPreset("S1");
  spec.n = 40;
  const auto g = GenerateUniformBipartiteGraph(40, 15, 5, 8);
  const auto t = DrawOutcomeModel(spec, 9);
  const std::vector<double> ones(15, 1.0), zeros(15, 0.0);
  const auto y1 = SimulateOutcomes(g, t, ones, 0.0, 1);
  const auto y0 = SimulateOutcomes(g, t, zeros, 0.0, 1);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_NEAR(y1.y[i] - y0.y[i], t.beta[i], 1e-12);
}

TEST(SimulateOutcomesTest, NoiseMomentsAndCovariates) {
  ScenarioSpec spec;
  spec.n = 20000;
  spec.a1 = 0.0;
  spec.b1 = 0.0;
  const auto g = GenerateUniformBipartiteGraph(spec.n, 10, 2, 10);
  const auto t = DrawOutcomeModel(spec, 11);
  const std::vector<double> zeros(10, 0.0);
  const double sd = 2.0;
  const auto perfect = SimulateOutcomes(g, t, zeros, sd, 12, CovariateMode::kPerfect);
  const auto proxy = SimulateOutcomes(g, t, zeros, sd, 12, CovariateMode::kProxy);
  double s = 0.0, ss = 0.0, cross = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double e = perfect.y[i] - t.alpha[i];
    s += e;
    ss += e * e;
    EXPECT_EQ(perfect.y[i], proxy.y[i]);
    EXPECT_EQ((*perfect.f)[i], perfect.y[i]);  // z = 0 so H = 0
    cross += e * ((*proxy.f)[i] - t.alpha[i]);
  }
  const double var = ss / spec.n - (s / spec.n) * (s / spec.n);
  EXPECT_NEAR(var / (sd * sd), 1.0, 0.05);
  // The proxy's noise is independent of the outcome noise.
  EXPECT_LT(std::fabs(cross / spec.n) / (sd * 1.0), 4.0 / std::sqrt(spec.n));
}

TEST(PresetsTest, Values) {
  const auto presets = ScenarioPresets();
  EXPECT_EQ(presets.size(), 4u);
  for (const auto& [name, spec] : presets) {
    EXPECT_EQ(spec.name, name);
    EXPECT_EQ(spec.m, 500u);
    EXPECT_EQ(spec.p, 0.5);
    EXPECT_EQ(spec.k, 1000u);
    EXPECT_EQ(spec.n_sims, 500u);
  }
  EXPECT_EQ(ScenarioPreset("S2").b1, 700.0);
  EXPECT_EQ(ScenarioPreset("S2").a0, 500.0);
  EXPECT_EQ(ScenarioPreset("S3").d, 100u);
  EXPECT_EQ(ScenarioPreset("S1").d, 5u);
  EXPECT_EQ(ScenarioPreset("S3").b1, -2.0);
  EXPECT_EQ(ScenarioPreset("S4").b0, 100.0);
  EXPECT_EQ(CodeOf([] { ScenarioPreset("S5"); }), ErrorCode::kUnknownScenario);
}

TEST(ValidateScenarioTest, Errors) {
  ScenarioSpec s;
  s.d = s.m + 1;
  EXPECT_EQ(CodeOf([&] { ValidateScenario(s); }), ErrorCode::kBadDegree);
  s = ScenarioSpec{};
  s.alpha = 1.0;
  EXPECT_EQ(CodeOf([&] { ValidateScenario(s); }), ErrorCode::kBadAlpha);
  s = ScenarioSpec{};
  s.k = 1;
  EXPECT_EQ(CodeOf([&] { ValidateScenario(s); }), ErrorCode::kBadReplicateCount);
  s = ScenarioSpec{};
  s.covariate = CovariateMode::kNone;
  const std::vector<Method> ca = {Method::kRVCA};
  EXPECT_EQ(CodeOf([&] { RunScenario(s, ca); }), ErrorCode::kMissingCovariates);
}

ScenarioSpec SmallSpec() {
  ScenarioSpec s = ScenarioPreset("S1");
  s.n = 120;
  s.m = 60;
  s.n_sims = 24;
  s.k = 60;
  s.master_seed = 5;
  return s;
}

TEST(RunScenarioTest, IdenticalAcrossThreadCounts) {
  const std::vector<Method> methods = {Method::kRV, Method::kSN, Method::kRVCA};
  const auto a = RunScenario(SmallSpec(), methods, {1, ReplicateEngine::kExposure});
  const auto b = RunScenario(SmallSpec(), methods, {4, ReplicateEngine::kExposure});
  std::ostringstream ta, tb, pa, pb;
  WriteTableTsv(a, ta);
  WriteTableTsv(b, tb);
  WritePerSimTsv(a, pa);
  WritePerSimTsv(b, pb);
  EXPECT_EQ(ta.str(), tb.str());
  EXPECT_EQ(pa.str(), pb.str());
  ASSERT_EQ(a.records.size(), 24u * 3);
}

TEST(RunScenarioTest, ReportArithmetic) {
  const std::vector<Method> methods = {Method::kRV, Method::kSN};
  const auto rep = RunScenario(SmallSpec(), methods);
  ASSERT_EQ(rep.methods.size(), 2u);
  const double z = oracle::QuantileByBisection(0.975);
  for (std::size_t j = 0; j < 2; ++j) {
    const auto& ms = rep.methods[j];
    EXPECT_EQ(ms.method, methods[j]);
    ASSERT_EQ(ms.t_stats.size(), 24u);
    double covered = 0.0, width = 0.0;
    for (std::size_t s = 0; s < 24; ++s) {
      const SimRecord& r = rep.records[s * 2 + j];
      EXPECT_EQ(r.sim, s);
      EXPECT_EQ(r.method, methods[j]);
      EXPECT_NEAR(r.t_stat, (r.point - rep.tau_true) / std::sqrt(r.variance), 1e-12);
      EXPECT_EQ(ms.t_stats[s], r.t_stat);
      EXPECT_EQ(r.covered, std::fabs(r.point - rep.tau_true) <= z * std::sqrt(r.variance) + 1e-12);
      covered += r.covered;
      width += 2 * z * std::sqrt(r.variance);
    }
    EXPECT_NEAR(ms.coverage, covered / 24, 1e-12);
    EXPECT_NEAR(ms.mean_ci_width, width / 24, 1e-6 * ms.mean_ci_width);
    EXPECT_NEAR(ms.normalized_ci_width,
                ms.mean_ci_width / (2 * z * std::sqrt(rep.empirical_estimator_variance)), 1e-6);
  }
}

TEST(RunScenarioTest, UnbiasedAcrossSimulations) {
  ScenarioSpec s = ScenarioPreset("S2");
  s.n = 200;
  s.n_sims = 400;
  s.k = 2;
  s.master_seed = 11;
  const std::vector<Method> rv = {Method::kRV};
  const auto rep = RunScenario(s, rv, {1, ReplicateEngine::kProjected});
  const double se = std::sqrt(rep.empirical_estimator_variance / s.n_sims);
  EXPECT_LE(std::fabs(rep.mean_tau_erl - rep.tau_true), 4 * se);
}

TEST(RunScenarioTest, PerfectProxyNarrowsIntervals) {
  ScenarioSpec s = ScenarioPreset("S1");
  s.n = 200;
  s.n_sims = 200;
  s.master_seed = 12;
  s.covariate = CovariateMode::kPerfect;
  const std::vector<Method> methods = {Method::kRV, Method::kRVCA};
  const auto rep = RunScenario(s, methods, {1, ReplicateEngine::kProjected});
  std::size_t narrower = 0;
  for (std::size_t i = 0; i < s.n_sims; ++i) {
    narrower += rep.records[i * 2 + 1].variance < rep.records[i * 2].variance;
  }
  EXPECT_GE(narrower, 190u);
}

}  // namespace
}  // namespace bipex
