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

#ifndef BIPEX_CLI_H_
#define BIPEX_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bipex/config.h"
#include "bipex/design.h"
#include "bipex/inference.h"
#include "bipex/simulation.h"

namespace bipex::cli {

enum class OutputFormat { kJson, kTsv };

struct AnalyzeConfig {
  std::string graph_path;
  std::string outcomes_path;
  std::string assignment_path;
  DesignKind design_kind = DesignKind::kIndependentBernoulli;
  double p = 0.5;
  std::string cluster_path;
  std::size_t k = kDefaultReplicates;
  double alpha = kDefaultAlpha;
  std::uint64_t seed = 0;
  std::vector<Method> methods{Method::kRV};
  OutputFormat format = OutputFormat::kJson;
  int threads = 1;
  ReplicateEngine engine = ReplicateEngine::kExposure;
  bool timing = false;
  std::string out_path;
};

// Keys: graph, outcomes, assignments, design.kind, design.p,
// design.cluster_file, k, alpha, seed, methods, format, threads, engine,
// timing, out. Values in `overrides` win over `file`.
AnalyzeConfig ResolveAnalyzeConfig(const KeyValueConfig& file,
                                   const KeyValueConfig& overrides);

// Reads the inputs, runs every requested method and writes the report to
// out. Warnings go to log, one per line. Throws bipex::Error.
void RunAnalyze(const AnalyzeConfig& config, std::ostream& out, std::ostream& log);

struct SimulateConfig {
  ScenarioSpec spec;
  std::vector<Method> methods{Method::kRV, Method::kSN};
  int threads = 1;
  ReplicateEngine engine = ReplicateEngine::kExposure;
  std::string table_path;    // empty: stdout
  std::string per_sim_path;  // empty: not written
};

// scenario is a preset name (S1..S4) or a key-value scenario file whose
// optional `base` key names the preset it starts from. Scenario keys: n, m,
// d, a0, a1, b0, b1, noise_sd, p, sims, k, alpha, seed, covariate. Overrides
// additionally accept methods, threads, engine, out, per_sim.
SimulateConfig ResolveSimulateConfig(const std::string& scenario,
                                     const KeyValueConfig& overrides);

void RunSimulate(const SimulateConfig& config, std::ostream& out, std::ostream& log);

struct GenGraphConfig {
  std::size_t n = 0;
  std::size_t m = 0;
  std::size_t d = 1;
  std::uint64_t seed = 0;
  std::string out_path;  // empty: stdout
};

void RunGenGraph(const GenGraphConfig& config, std::ostream& out);

std::vector<Method> ParseMethodList(const std::string& list);

}  // namespace bipex::cli

#endif  // BIPEX_CLI_H_
