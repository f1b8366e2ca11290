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

// Command-line entry point: analyze, simulate, gen-graph.

#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bipex/cli.h"
#include "bipex/config.h"
#include "bipex/error.h"

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

// Records a flag in the override map only when the user supplied it.
void Forward(const CLI::Option* opt, const std::string& key, const std::string& value,
             bipex::KeyValueConfig& overrides) {
  if (opt->count() > 0) overrides.Set(key, value);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomization inference for bipartite experiments"};
  app.require_subcommand(1);

  // Numeric flags are captured as text so config-file and flag values share
  // one parser.
  std::string seed, threads, alpha, k, format, out;

  auto* analyze = app.add_subcommand("analyze", "Estimate GATE with confidence intervals");
  std::string config_path, graph, outcomes, assignments, design, p, clusters, methods, engine;
  bool timing = false;
  analyze->add_option("--config", config_path, "key = value configuration file");
  auto* a_graph = analyze->add_option("--graph", graph, "edge-list TSV");
  auto* a_outcomes = analyze->add_option("--outcomes", outcomes, "outcome TSV");
  auto* a_assign = analyze->add_option("--assignments", assignments, "observed assignment TSV");
  auto* a_design = analyze->add_option("--design", design, "bernoulli|cluster");
  auto* a_p = analyze->add_option("--p", p, "treatment probability (default 0.5)");
  auto* a_clusters = analyze->add_option("--clusters", clusters, "cluster TSV");
  auto* a_methods = analyze->add_option("--methods", methods, "comma list of rv,rv_ca,sn");
  auto* a_seed = analyze->add_option("--seed", seed, "master seed");
  auto* a_threads = analyze->add_option("--threads", threads, "worker threads (0 = all)");
  auto* a_alpha = analyze->add_option("--alpha", alpha, "CI level (default 0.05)");
  auto* a_k = analyze->add_option("--k", k, "re-randomizations (default 1000)");
  auto* a_format = analyze->add_option("--format", format, "json|tsv");
  auto* a_out = analyze->add_option("--out", out, "output path (default stdout)");
  auto* a_engine = analyze->add_option("--engine", engine, "exposure|projected");
  auto* a_timing = analyze->add_flag("--timing", timing, "include runtime_ms in the report");

  auto* simulate = app.add_subcommand("simulate", "Run a coverage simulation scenario");
  std::string scenario, s_n, s_m, s_d, sims, per_sim, covariate, s_methods, s_engine;
  std::string s_seed, s_threads, s_alpha, s_k;
  simulate->add_option("scenario", scenario, "preset (S1..S4) or scenario file")->required();
  auto* s_n_opt = simulate->add_option("--n", s_n, "analysis units");
  auto* s_m_opt = simulate->add_option("--m", s_m, "randomization units");
  auto* s_d_opt = simulate->add_option("--d", s_d, "per-unit degree");
  auto* s_sims_opt = simulate->add_option("--sims", sims, "simulated experiments");
  auto* s_k_opt = simulate->add_option("--k", s_k, "re-randomizations");
  auto* s_seed_opt = simulate->add_option("--seed", s_seed, "master seed");
  auto* s_alpha_opt = simulate->add_option("--alpha", s_alpha, "CI level");
  auto* s_threads_opt = simulate->add_option("--threads", s_threads, "worker threads (0 = all)");
  auto* s_methods_opt = simulate->add_option("--methods", s_methods, "comma list of rv,rv_ca,sn");
  auto* s_cov_opt = simulate->add_option("--covariate", covariate, "none|proxy|perfect");
  auto* s_engine_opt = simulate->add_option("--engine", s_engine, "exposure|projected");
  std::string s_out;
  auto* s_out_opt = simulate->add_option("--out", s_out, "table TSV path (default stdout)");
  auto* s_per_sim_opt = simulate->add_option("--per-sim", per_sim, "per-simulation TSV path");

  auto* gen = app.add_subcommand("gen-graph", "Write a uniform-degree bipartite graph");
  bipex::cli::GenGraphConfig gen_cfg;
  gen->add_option("--n", gen_cfg.n, "analysis units")->required();
  gen->add_option("--m", gen_cfg.m, "randomization units")->required();
  gen->add_option("--d", gen_cfg.d, "per-unit degree")->required();
  gen->add_option("--seed", gen_cfg.seed, "seed");
  gen->add_option("--out", gen_cfg.out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "UsageError: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      bipex::KeyValueConfig file;
      if (!config_path.empty()) file = bipex::KeyValueConfig::Load(config_path);
      bipex::KeyValueConfig flags;
      Forward(a_graph, "graph", graph, flags);
      Forward(a_outcomes, "outcomes", outcomes, flags);
      Forward(a_assign, "assignments", assignments, flags);
      Forward(a_design, "design.kind", design, flags);
      Forward(a_p, "design.p", p, flags);
      Forward(a_clusters, "design.cluster_file", clusters, flags);
      Forward(a_methods, "methods", methods, flags);
      Forward(a_seed, "seed", seed, flags);
      Forward(a_threads, "threads", threads, flags);
      Forward(a_alpha, "alpha", alpha, flags);
      Forward(a_k, "k", k, flags);
      Forward(a_format, "format", format, flags);
      Forward(a_out, "out", out, flags);
      Forward(a_engine, "engine", engine, flags);
      if (a_timing->count() > 0) flags.Set("timing", timing ? "true" : "false");
      const auto cfg = bipex::cli::ResolveAnalyzeConfig(file, flags);
      bipex::cli::RunAnalyze(cfg, std::cout, std::cerr);
    } else if (simulate->parsed()) {
      bipex::KeyValueConfig flags;
      Forward(s_n_opt, "n", s_n, flags);
      Forward(s_m_opt, "m", s_m, flags);
      Forward(s_d_opt, "d", s_d, flags);
      Forward(s_sims_opt, "sims", sims, flags);
      Forward(s_k_opt, "k", s_k, flags);
      Forward(s_seed_opt, "seed", s_seed, flags);
      Forward(s_alpha_opt, "alpha", s_alpha, flags);
      Forward(s_threads_opt, "threads", s_threads, flags);
      Forward(s_methods_opt, "methods", s_methods, flags);
      Forward(s_cov_opt, "covariate", covariate, flags);
      Forward(s_engine_opt, "engine", s_engine, flags);
      Forward(s_out_opt, "out", s_out, flags);
      Forward(s_per_sim_opt, "per_sim", per_sim, flags);
      const auto cfg = bipex::cli::ResolveSimulateConfig(scenario, flags);
      bipex::cli::RunSimulate(cfg, std::cout, std::cerr);
    } else if (gen->parsed()) {
      bipex::cli::RunGenGraph(gen_cfg, std::cout);
    }
  } catch (const bipex::Error& e) {
    std::cerr << bipex::ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << '\n';
    return kExitError;
  }
  return 0;
}
