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

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "bipex/design.h"
#include "bipex/error.h"
#include "bipex/io.h"
#include "bipex/numeric.h"
#include "bipex/random.h"

namespace bipex {
namespace {

// Stream tags under a scenario or simulation seed.
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kCoefficientStream = 2;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kReplicateStream = 2;
constexpr std::uint64_t kCovariateNoiseStream = 3;

ScenarioSpec MakePreset(const std::string& name, std::size_t d, double a0,
                        double a1, double b0, double b1) {
  ScenarioSpec s;
  s.name = name;
  s.m = 500;
  s.d = d;
  s.a0 = a0;
  s.a1 = a1;
  s.b0 = b0;
  s.b1 = b1;
  s.p = 0.5;
  s.k = 1000;
  s.n_sims = 500;
  return s;
}

// Unif(lo, lo + width); a negative width flips the endpoints.
double UniformRange(Engine& engine, double lo, double width) {
  const double a = std::min(lo, lo + width);
  const double b = std::max(lo, lo + width);
  return a + (b - a) * UniformUnit(engine);
}

std::vector<double> NormalDraws(std::size_t count, double sd, std::uint64_t seed) {
  std::vector<double> out(count, 0.0);
  if (sd == 0.0) return out;
  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, sd);
  for (double& v : out) v = normal(engine);
  return out;
}

double SampleVariance(std::span<const double> values) {
  if (values.size() < 2) return std::nan("");
  const double mean = CompensatedTotal(values) / static_cast<double>(values.size());
  CompensatedSum ss;
  for (double v : values) ss.Add((v - mean) * (v - mean));
  return ss.Value() / static_cast<double>(values.size() - 1);
}

}  // namespace

void ValidateScenario(const ScenarioSpec& spec) {
  if (spec.d < 1 || spec.d > spec.m) {
    throw Error(ErrorCode::kBadDegree,
                "degree d = " + std::to_string(spec.d) + " must satisfy 1 <= d <= m = " +
                    std::to_string(spec.m));
  }
  if (spec.n_sims < 1) throw Error(ErrorCode::kBadConfig, "n_sims must be >= 1");
  if (spec.n < 1) throw Error(ErrorCode::kBadConfig, "n must be >= 1");
  if (!(spec.p > 0.0 && spec.p < 1.0)) {
    throw Error(ErrorCode::kBadDesign, "p must lie in (0, 1)");
  }
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw Error(ErrorCode::kBadAlpha, "alpha must lie in (0, 1)");
  }
  if (spec.k < 2) throw Error(ErrorCode::kBadReplicateCount, "K must be >= 2");
  if (!(spec.noise_sd >= 0.0) || !std::isfinite(spec.noise_sd)) {
    throw Error(ErrorCode::kBadConfig, "noise_sd must be finite and nonnegative");
  }
}

std::map<std::string, ScenarioSpec> ScenarioPresets() {
  return {
      {"S1", MakePreset("S1", 5, 5.0, 2.0, 1.0, -2.0)},
      {"S2", MakePreset("S2", 5, 500.0, 500.0, 100.0, 700.0)},
      {"S3", MakePreset("S3", 100, 5.0, 2.0, 1.0, -2.0)},
      {"S4", MakePreset("S4", 100, 500.0, 500.0, 100.0, 700.0)},
  };
}

ScenarioSpec ScenarioPreset(const std::string& name) {
  const auto presets = ScenarioPresets();
  auto it = presets.find(name);
  if (it == presets.end()) {
    throw Error(ErrorCode::kUnknownScenario, "unknown scenario '" + name + "'");
  }
  return it->second;
}

BipartiteGraph GenerateUniformBipartiteGraph(std::size_t n, std::size_t m,
                                             std::size_t d, std::uint64_t seed) {
  if (d < 1 || d > m) {
    throw Error(ErrorCode::kBadDegree,
                "degree d = " + std::to_string(d) + " must satisfy 1 <= d <= m = " +
                    std::to_string(m));
  }
  Engine engine(seed);
  const double w = 1.0 / static_cast<double>(d);
  std::vector<char> taken(m, 0);
  std::vector<std::vector<std::pair<UnitIndex, double>>> rows(n);
  for (auto& row : rows) {
    // Floyd's sampling of d distinct indices from [0, m).
    row.reserve(d);
    for (std::size_t j = m - d; j < m; ++j) {
      std::uniform_int_distribution<std::size_t> pick(0, j);
      std::size_t t = pick(engine);
      if (taken[t]) t = j;
      taken[t] = 1;
      row.emplace_back(static_cast<UnitIndex>(t), w);
    }
    for (const auto& [r, weight] : row) taken[r] = 0;
  }
  return BipartiteGraph::FromRows(m, std::move(rows));
}

GroundTruth DrawOutcomeModel(const ScenarioSpec& spec, std::uint64_t seed) {
  Engine engine(seed);
  GroundTruth truth;
  truth.alpha.resize(spec.n);
  truth.beta.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    truth.alpha[i] = UniformRange(engine, spec.a0, spec.a1);
    truth.beta[i] = UniformRange(engine, spec.b0, spec.b1);
  }
  truth.tau_true =
      spec.n == 0 ? 0.0 : CompensatedTotal(truth.beta) / static_cast<double>(spec.n);
  return truth;
}

OutcomePanel SimulateOutcomes(const BipartiteGraph& graph,
                              const GroundTruth& truth,
                              std::span<const double> z, double noise_sd,
                              std::uint64_t seed, CovariateMode covariate) {
  const std::size_t n = graph.num_analysis();
  if (truth.alpha.size() != n || truth.beta.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "ground truth does not match graph");
  }
  if (z.size() != graph.num_rand()) {
    throw Error(ErrorCode::kLengthMismatch, "assignment length does not match m");
  }
  const std::vector<double> noise = NormalDraws(n, noise_sd, MixSeed(seed, kNoiseStream));
  const auto offsets = graph.row_offsets();
  const auto cols = graph.rand_indices();
  const auto weights = graph.weights();

  OutcomePanel panel;
  panel.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) h += weights[e] * z[cols[e]];
    panel.y[i] = truth.alpha[i] + truth.beta[i] * h + noise[i];
  }
  if (covariate == CovariateMode::kProxy) {
    std::vector<double> pre = NormalDraws(n, 1.0, MixSeed(seed, kCovariateNoiseStream));
    for (std::size_t i = 0; i < n; ++i) pre[i] += truth.alpha[i];
    panel.f = std::move(pre);
  } else if (covariate == CovariateMode::kPerfect) {
    std::vector<double> pre(n);
    for (std::size_t i = 0; i < n; ++i) pre[i] = truth.alpha[i] + noise[i];
    panel.f = std::move(pre);
  }
  return panel;
}

SimulationReport RunScenario(const ScenarioSpec& spec,
                             std::span<const Method> methods,
                             const RunOptions& options) {
  ValidateScenario(spec);
  if (methods.empty()) throw Error(ErrorCode::kBadConfig, "no methods requested");
  const bool want_ca =
      std::find(methods.begin(), methods.end(), Method::kRVCA) != methods.end();
  if (want_ca && spec.covariate == CovariateMode::kNone) {
    throw Error(ErrorCode::kMissingCovariates,
                "RV_CA needs a simulated covariate (covariate mode is none)");
  }

  const std::uint64_t root = MixSeed(spec.master_seed, 0);
  const BipartiteGraph graph =
      GenerateUniformBipartiteGraph(spec.n, spec.m, spec.d, MixSeed(root, kGraphStream));
  const GroundTruth truth = DrawOutcomeModel(spec, MixSeed(root, kCoefficientStream));
  const Design design = Design::Bernoulli(spec.p);
  const ExposureMoments moments = ComputeExposureMoments(graph, design);
  const CovariateMode covariate = want_ca ? spec.covariate : CovariateMode::kNone;

  const std::size_t num_methods = methods.size();
  std::vector<double> tau_erl(spec.n_sims);
  std::vector<SimRecord> records(spec.n_sims * num_methods);
  std::vector<double> widths(spec.n_sims * num_methods);

  ParallelForBlocks(spec.n_sims, 1, options.threads, [&](std::size_t begin,
                                                         std::size_t end) {
    std::vector<double> z(graph.num_rand());
    for (std::size_t s = begin; s < end; ++s) {
      const std::uint64_t sim_seed = MixSeed(spec.master_seed, s + 1);
      DrawAssignmentInto(design, sim_seed, 0, z);
      const OutcomePanel panel =
          SimulateOutcomes(graph, truth, z, spec.noise_sd, sim_seed, covariate);
      ReplicateOptions ropt;
      ropt.k = spec.k;
      ropt.master_seed = MixSeed(sim_seed, kReplicateStream);
      ropt.threads = 1;
      ropt.engine = options.engine;
      const AnalysisResult result =
          AnalyzeExperiment(graph, design, moments, panel, z, methods, ropt, spec.alpha);
      tau_erl[s] = result.estimates.tau_erl;
      for (std::size_t j = 0; j < num_methods; ++j) {
        const MethodResult& mr = result.methods[j];
        SimRecord& rec = records[s * num_methods + j];
        rec.sim = s;
        rec.method = mr.method;
        rec.point = mr.point;
        rec.variance = mr.variance;
        rec.t_stat = (mr.point - truth.tau_true) / std::sqrt(mr.variance);
        rec.covered = mr.ci.Contains(truth.tau_true);
        widths[s * num_methods + j] = mr.ci.width();
      }
    }
  });

  SimulationReport report;
  report.spec = spec;
  report.degree = ComputeDegreeStats(graph);
  report.tau_true = truth.tau_true;
  report.mean_tau_erl = CompensatedTotal(tau_erl) / static_cast<double>(spec.n_sims);
  report.empirical_estimator_variance = SampleVariance(tau_erl);
  const double reference_width = 2.0 * NormalQuantile(1.0 - spec.alpha / 2.0) *
                                 std::sqrt(report.empirical_estimator_variance);

  for (std::size_t j = 0; j < num_methods; ++j) {
    MethodSummary summary;
    summary.method = methods[j];
    CompensatedSum width_sum;
    std::size_t covered = 0;
    summary.t_stats.reserve(spec.n_sims);
    for (std::size_t s = 0; s < spec.n_sims; ++s) {
      const SimRecord& rec = records[s * num_methods + j];
      width_sum.Add(widths[s * num_methods + j]);
      covered += rec.covered ? 1 : 0;
      summary.t_stats.push_back(rec.t_stat);
    }
    summary.coverage = static_cast<double>(covered) / static_cast<double>(spec.n_sims);
    summary.mean_ci_width = width_sum.Value() / static_cast<double>(spec.n_sims);
    summary.normalized_ci_width = summary.mean_ci_width / reference_width;
    report.methods.push_back(std::move(summary));
  }
  report.records = std::move(records);
  return report;
}

void WriteTableTsv(const SimulationReport& report, std::ostream& out, bool header) {
  if (header) out << "scenario\tn\tmethod\tcoverage\tmean_width\tnormalized_width\n";
  for (const MethodSummary& s : report.methods) {
    out << report.spec.name << '\t' << report.spec.n << '\t' << MethodName(s.method)
        << '\t' << FormatDouble(s.coverage) << '\t' << FormatDouble(s.mean_ci_width)
        << '\t' << FormatDouble(s.normalized_ci_width) << '\n';
  }
}

void WritePerSimTsv(const SimulationReport& report, std::ostream& out) {
  out << "sim\tmethod\tpoint\tvariance\tt_stat\tcovered\n";
  for (const SimRecord& r : report.records) {
    out << r.sim << '\t' << MethodName(r.method) << '\t' << FormatDouble(r.point) << '\t'
        << FormatDouble(r.variance) << '\t' << FormatDouble(r.t_stat) << '\t'
        << (r.covered ? 1 : 0) << '\n';
  }
}

}  // namespace bipex
