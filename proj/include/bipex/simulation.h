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

#ifndef BIPEX_SIMULATION_H_
#define BIPEX_SIMULATION_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bipex/estimator.h"
#include "bipex/graph.h"
#include "bipex/inference.h"

namespace bipex {

// Covariate column attached to simulated panels.
enum class CovariateMode {
  kNone,
  kProxy,    // f_i = alpha_i + e'_i, e' independent of the experiment noise
  kPerfect,  // f_i = alpha_i + e_i, sharing the experiment noise
};

// Synthetic experiment: Y_i = alpha_i + beta_i H_i(Z) + e_i with
// alpha_i ~ Unif(a0, a0 + a1), beta_i ~ Unif(b0, b0 + b1), e_i ~ N(0, sd^2).
struct ScenarioSpec {
  std::string name = "custom";
  std::size_t n = 1000;
  std::size_t m = 500;
  std::size_t d = 5;
  double a0 = 5.0;
  double a1 = 2.0;
  double b0 = 1.0;
  double b1 = -2.0;
  double noise_sd = 1.0;
  double p = 0.5;
  std::size_t n_sims = 500;
  std::size_t k = kDefaultReplicates;
  double alpha = kDefaultAlpha;
  std::uint64_t master_seed = 0;
  CovariateMode covariate = CovariateMode::kProxy;
};

// Throws BadDegree / BadConfig.
void ValidateScenario(const ScenarioSpec& spec);

// S1..S4: sparse/dense graph (d = 5 / 100) crossed with near-zero or large
// positive effects; m = 500, p = 0.5, K = 1000, 500 simulations.
std::map<std::string, ScenarioSpec> ScenarioPresets();
// Throws UnknownScenario.
ScenarioSpec ScenarioPreset(const std::string& name);

// Each analysis unit is joined to d distinct randomization units drawn
// uniformly without replacement, every edge weighted 1/d.
BipartiteGraph GenerateUniformBipartiteGraph(std::size_t n, std::size_t m,
                                             std::size_t d, std::uint64_t seed);

struct GroundTruth {
  std::vector<double> alpha;
  std::vector<double> beta;
  double tau_true = 0.0;  // mean of beta
};

GroundTruth DrawOutcomeModel(const ScenarioSpec& spec, std::uint64_t seed);

// Observed outcomes for assignment z with fresh noise drawn from seed.
OutcomePanel SimulateOutcomes(const BipartiteGraph& graph,
                              const GroundTruth& truth,
                              std::span<const double> z, double noise_sd,
                              std::uint64_t seed,
                              CovariateMode covariate = CovariateMode::kNone);

struct MethodSummary {
  Method method = Method::kRV;
  double coverage = 0.0;
  double mean_ci_width = 0.0;
  double normalized_ci_width = 0.0;
  std::vector<double> t_stats;
};

struct SimRecord {
  std::size_t sim = 0;
  Method method = Method::kRV;
  double point = 0.0;
  double variance = 0.0;
  double t_stat = 0.0;
  bool covered = false;
};

struct SimulationReport {
  ScenarioSpec spec;
  DegreeStats degree;
  double tau_true = 0.0;
  double mean_tau_erl = 0.0;
  // Sample variance of the ERL estimate across simulated experiments; the
  // width normaliser.
  double empirical_estimator_variance = 0.0;
  std::vector<MethodSummary> methods;
  std::vector<SimRecord> records;  // sim-major, then method order
};

struct RunOptions {
  int threads = 1;
  ReplicateEngine engine = ReplicateEngine::kExposure;
};

// Draws the graph and coefficients once, then runs n_sims experiments.
// Output is a pure function of the scenario (threads only change speed).
SimulationReport RunScenario(const ScenarioSpec& spec,
                             std::span<const Method> methods,
                             const RunOptions& options = {});

// scenario, n, method, coverage, mean_width, normalized_width
void WriteTableTsv(const SimulationReport& report, std::ostream& out,
                   bool header = true);
// sim, method, point, variance, t_stat, covered
void WritePerSimTsv(const SimulationReport& report, std::ostream& out);

}  // namespace bipex

#endif  // BIPEX_SIMULATION_H_
