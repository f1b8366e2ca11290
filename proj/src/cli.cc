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

#include "bipex/cli.h"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bipex/error.h"
#include "bipex/graph.h"
#include "bipex/io.h"
#include "bipex/numeric.h"
#include "bipex/random.h"

namespace bipex::cli {
namespace {

using Json = nlohmann::ordered_json;

const std::set<std::string> kAnalyzeKeys = {
    "graph", "outcomes", "assignments", "design.kind", "design.p", "design.cluster_file",
    "k", "alpha", "seed", "methods", "format", "threads", "engine", "timing", "out"};

const std::set<std::string> kScenarioKeys = {
    "base", "name", "n", "m", "d", "a0", "a1", "b0", "b1", "noise_sd", "p",
    "sims", "k", "alpha", "seed", "covariate"};

const std::set<std::string> kSimulateExtraKeys = {"methods", "threads", "engine", "out",
                                                  "per_sim"};

void CheckKeys(const KeyValueConfig& cfg, const std::set<std::string>& allowed,
               const std::set<std::string>& extra = {}) {
  for (const auto& [key, value] : cfg.values()) {
    if (!allowed.count(key) && !extra.count(key)) {
      throw Error(ErrorCode::kBadConfig, "unknown configuration key '" + key + "'");
    }
  }
}

// Flag value if given, else file value.
KeyValueConfig Merge(const KeyValueConfig& file, const KeyValueConfig& overrides) {
  KeyValueConfig merged = file;
  for (const auto& [key, value] : overrides.values()) merged.Set(key, value);
  return merged;
}

ReplicateEngine ParseEngine(const std::string& name) {
  if (name == "exposure") return ReplicateEngine::kExposure;
  if (name == "projected") return ReplicateEngine::kProjected;
  throw Error(ErrorCode::kBadConfig, "engine must be exposure or projected, got '" + name + "'");
}

std::string_view EngineName(ReplicateEngine engine) {
  return engine == ReplicateEngine::kExposure ? "exposure" : "projected";
}

CovariateMode ParseCovariate(const std::string& name) {
  if (name == "none") return CovariateMode::kNone;
  if (name == "proxy") return CovariateMode::kProxy;
  if (name == "perfect") return CovariateMode::kPerfect;
  throw Error(ErrorCode::kBadConfig,
              "covariate must be none, proxy or perfect, got '" + name + "'");
}

bool ParseBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw Error(ErrorCode::kBadConfig, "key '" + key + "' expects true/false, got " + value);
}

std::size_t GetCount(const KeyValueConfig& cfg, const std::string& key, std::size_t fallback) {
  const auto v = cfg.GetUnsigned(key);
  return v ? static_cast<std::size_t>(*v) : fallback;
}

std::ifstream Open(const std::string& path, const char* what) {
  if (path.empty()) {
    throw Error(ErrorCode::kBadConfig, std::string("missing required ") + what + " path");
  }
  return OpenInput(path);
}

// Writes through `fallback` unless a path is given.
class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw Error(ErrorCode::kIoError, "cannot write '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& stream() { return *stream_; }
  void Finish(const std::string& path) {
    stream_->flush();
    if (!*stream_) throw Error(ErrorCode::kIoError, "write failed for '" + path + "'");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

std::string JoinMethods(const std::vector<Method>& methods) {
  std::string out;
  for (Method m : methods) {
    if (!out.empty()) out += ',';
    std::string name(MethodName(m));
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    out += name;
  }
  return out;
}

void ApplyScenarioKeys(ScenarioSpec& spec, const KeyValueConfig& cfg) {
  if (auto v = cfg.Get("name")) spec.name = *v;
  spec.n = GetCount(cfg, "n", spec.n);
  spec.m = GetCount(cfg, "m", spec.m);
  spec.d = GetCount(cfg, "d", spec.d);
  if (auto v = cfg.GetDouble("a0")) spec.a0 = *v;
  if (auto v = cfg.GetDouble("a1")) spec.a1 = *v;
  if (auto v = cfg.GetDouble("b0")) spec.b0 = *v;
  if (auto v = cfg.GetDouble("b1")) spec.b1 = *v;
  if (auto v = cfg.GetDouble("noise_sd")) spec.noise_sd = *v;
  if (auto v = cfg.GetDouble("p")) spec.p = *v;
  spec.n_sims = GetCount(cfg, "sims", spec.n_sims);
  spec.k = GetCount(cfg, "k", spec.k);
  if (auto v = cfg.GetDouble("alpha")) spec.alpha = *v;
  if (auto v = cfg.GetUnsigned("seed")) spec.master_seed = *v;
  if (auto v = cfg.Get("covariate")) spec.covariate = ParseCovariate(*v);
}

}  // namespace

std::vector<Method> ParseMethodList(const std::string& list) {
  std::vector<Method> methods;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto m = ParseMethod(item);
    if (!m) throw Error(ErrorCode::kBadConfig, "unknown method '" + item + "'");
    if (std::find(methods.begin(), methods.end(), *m) == methods.end()) methods.push_back(*m);
  }
  if (methods.empty()) throw Error(ErrorCode::kBadConfig, "empty method list");
  return methods;
}

AnalyzeConfig ResolveAnalyzeConfig(const KeyValueConfig& file,
                                   const KeyValueConfig& overrides) {
  CheckKeys(file, kAnalyzeKeys);
  CheckKeys(overrides, kAnalyzeKeys);
  const KeyValueConfig cfg = Merge(file, overrides);

  AnalyzeConfig out;
  out.graph_path = cfg.Get("graph").value_or("");
  out.outcomes_path = cfg.Get("outcomes").value_or("");
  out.assignment_path = cfg.Get("assignments").value_or("");
  if (auto kind = cfg.Get("design.kind")) {
    if (*kind == "bernoulli") {
      out.design_kind = DesignKind::kIndependentBernoulli;
    } else if (*kind == "cluster") {
      out.design_kind = DesignKind::kIndependentCluster;
    } else {
      throw Error(ErrorCode::kBadConfig,
                  "design.kind must be bernoulli or cluster, got '" + *kind + "'");
    }
  }
  if (auto p = cfg.GetDouble("design.p")) out.p = *p;
  out.cluster_path = cfg.Get("design.cluster_file").value_or("");
  out.k = GetCount(cfg, "k", out.k);
  if (auto a = cfg.GetDouble("alpha")) out.alpha = *a;
  if (auto s = cfg.GetUnsigned("seed")) out.seed = *s;
  if (auto m = cfg.Get("methods")) out.methods = ParseMethodList(*m);
  if (auto f = cfg.Get("format")) {
    if (*f == "json") {
      out.format = OutputFormat::kJson;
    } else if (*f == "tsv") {
      out.format = OutputFormat::kTsv;
    } else {
      throw Error(ErrorCode::kBadConfig, "format must be json or tsv, got '" + *f + "'");
    }
  }
  out.threads = static_cast<int>(GetCount(cfg, "threads", 1));
  if (auto e = cfg.Get("engine")) out.engine = ParseEngine(*e);
  if (auto t = cfg.Get("timing")) out.timing = ParseBool("timing", *t);
  out.out_path = cfg.Get("out").value_or("");

  if (!(out.alpha > 0.0 && out.alpha < 1.0)) {
    throw Error(ErrorCode::kBadAlpha,
                "alpha must lie in (0, 1), got " + FormatDouble(out.alpha));
  }
  if (out.k < 2) {
    throw Error(ErrorCode::kBadReplicateCount, "K must be at least 2");
  }
  if (out.design_kind == DesignKind::kIndependentCluster && out.cluster_path.empty()) {
    throw Error(ErrorCode::kBadConfig, "cluster design needs design.cluster_file");
  }
  return out;
}

void RunAnalyze(const AnalyzeConfig& config, std::ostream& out, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();

  BipartiteGraph graph;
  {
    auto in = Open(config.graph_path, "graph");
    graph = BipartiteGraph::FromEdges(ReadEdgeList(in));
  }
  const DegreeStats degree = ComputeDegreeStats(graph);
  std::vector<std::string> warnings;
  if (graph.MaxRowSum() > 1.0 + 1e-12) {
    warnings.push_back("some exposure rows sum above 1 (max " +
                       FormatDouble(graph.MaxRowSum()) + ")");
  }

  OutcomePanel panel;
  {
    auto in = Open(config.outcomes_path, "outcomes");
    panel = AlignOutcomes(graph, ReadOutcomes(in));
  }
  std::vector<double> z;
  {
    auto in = Open(config.assignment_path, "assignments");
    z = AlignAssignment(graph, ReadAssignments(in));
  }
  const Design design = [&] {
    if (config.design_kind == DesignKind::kIndependentBernoulli) {
      return Design::Bernoulli(config.p);
    }
    auto in = Open(config.cluster_path, "cluster");
    const auto labels = AlignClusters(graph, ReadClusters(in));
    return Design::Cluster(config.p, labels);
  }();

  const ExposureMoments moments = ComputeExposureMoments(graph, design);
  ReplicateOptions ropt;
  ropt.k = config.k;
  ropt.master_seed = config.seed;
  ropt.threads = ResolveThreads(config.threads);
  ropt.engine = config.engine;
  const AnalysisResult result = AnalyzeExperiment(graph, design, moments, panel, z,
                                                  config.methods, ropt, config.alpha);
  const auto runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - start)
                              .count();

  for (const auto& w : warnings) log << "warning: " << w << '\n';
  for (const MethodResult& r : result.methods) {
    for (const auto& w : r.warnings) log << "warning: " << MethodName(r.method) << ": " << w << '\n';
  }

  OutputSink sink(config.out_path, out);
  std::ostream& os = sink.stream();
  if (config.format == OutputFormat::kTsv) {
    os << "method\tpoint\tvariance\tci_lower\tci_upper\talpha\tK\tlambda_hat\tseed\tn\tm\td_bar";
    if (config.timing) os << "\truntime_ms";
    os << '\n';
    for (const MethodResult& r : result.methods) {
      os << MethodName(r.method) << '\t' << FormatDouble(r.point) << '\t'
         << FormatDouble(r.variance) << '\t' << FormatDouble(r.ci.lower) << '\t'
         << FormatDouble(r.ci.upper) << '\t' << FormatDouble(config.alpha) << '\t' << config.k
         << '\t' << FormatDouble(r.lambda_hat.value_or(0.0)) << '\t' << config.seed << '\t'
         << graph.num_analysis() << '\t' << graph.num_rand() << '\t' << degree.d_bar;
      if (config.timing) os << '\t' << runtime_ms;
      os << '\n';
    }
  } else {
    Json resolved;
    resolved["graph"] = config.graph_path;
    resolved["outcomes"] = config.outcomes_path;
    resolved["assignments"] = config.assignment_path;
    resolved["design.kind"] =
        config.design_kind == DesignKind::kIndependentBernoulli ? "bernoulli" : "cluster";
    resolved["design.p"] = config.p;
    resolved["design.cluster_file"] = config.cluster_path;
    resolved["k"] = config.k;
    resolved["alpha"] = config.alpha;
    resolved["seed"] = config.seed;
    resolved["methods"] = JoinMethods(config.methods);
    resolved["engine"] = EngineName(config.engine);
    resolved["rng"] = kRngName;

    for (const MethodResult& r : result.methods) {
      Json j;
      j["method"] = MethodName(r.method);
      j["point"] = r.point;
      j["variance"] = r.variance;
      j["ci_lower"] = r.ci.lower;
      j["ci_upper"] = r.ci.upper;
      j["alpha"] = config.alpha;
      j["K"] = config.k;
      j["lambda_hat"] = r.lambda_hat.value_or(0.0);
      j["adjusted"] = r.method == Method::kRVCA;
      j["seed"] = config.seed;
      j["n"] = graph.num_analysis();
      j["m"] = graph.num_rand();
      j["d_bar"] = degree.d_bar;
      j["tau_erl"] = result.estimates.tau_erl;
      if (panel.has_covariate()) j["tau_f"] = result.estimates.tau_f;
      Json w = Json::array();
      for (const auto& s : warnings) w.push_back(s);
      for (const auto& s : r.warnings) w.push_back(s);
      j["warnings"] = std::move(w);
      j["config"] = resolved;
      if (config.timing) j["runtime_ms"] = runtime_ms;
      os << j.dump() << '\n';
    }
  }
  sink.Finish(config.out_path);
}

SimulateConfig ResolveSimulateConfig(const std::string& scenario,
                                     const KeyValueConfig& overrides) {
  SimulateConfig out;
  const auto presets = ScenarioPresets();
  if (presets.count(scenario)) {
    out.spec = presets.at(scenario);
  } else if (std::filesystem::is_regular_file(scenario)) {
    const KeyValueConfig file = KeyValueConfig::Load(scenario);
    CheckKeys(file, kScenarioKeys);
    if (auto base = file.Get("base")) {
      out.spec = ScenarioPreset(*base);
    } else {
      out.spec.name = std::filesystem::path(scenario).stem().string();
    }
    ApplyScenarioKeys(out.spec, file);
  } else {
    throw Error(ErrorCode::kUnknownScenario,
                "'" + scenario + "' is neither a preset (S1..S4) nor a scenario file");
  }

  CheckKeys(overrides, kScenarioKeys, kSimulateExtraKeys);
  ApplyScenarioKeys(out.spec, overrides);
  if (auto m = overrides.Get("methods")) out.methods = ParseMethodList(*m);
  out.threads = static_cast<int>(GetCount(overrides, "threads", 1));
  if (auto e = overrides.Get("engine")) out.engine = ParseEngine(*e);
  out.table_path = overrides.Get("out").value_or("");
  out.per_sim_path = overrides.Get("per_sim").value_or("");
  ValidateScenario(out.spec);
  return out;
}

void RunSimulate(const SimulateConfig& config, std::ostream& out, std::ostream& log) {
  RunOptions options;
  options.threads = ResolveThreads(config.threads);
  options.engine = config.engine;
  const SimulationReport report = RunScenario(config.spec, config.methods, options);

  log << "scenario " << report.spec.name << ": n=" << report.spec.n
      << " m=" << report.spec.m << " d=" << report.spec.d << " d_bar=" << report.degree.d_bar
      << " sims=" << report.spec.n_sims << " K=" << report.spec.k
      << " seed=" << report.spec.master_seed << '\n'
      << "tau_true=" << FormatDouble(report.tau_true)
      << " mean_tau_erl=" << FormatDouble(report.mean_tau_erl)
      << " bias=" << FormatDouble(report.mean_tau_erl - report.tau_true)
      << " empirical_variance=" << FormatDouble(report.empirical_estimator_variance) << '\n';
  if (std::find(config.methods.begin(), config.methods.end(), Method::kRVCA) !=
      config.methods.end()) {
    log << "note: RV_CA rows use a simulated pre-period covariate ("
        << (config.spec.covariate == CovariateMode::kPerfect ? "alpha + e" : "alpha + e'")
        << "), an extension of the base outcome model\n";
  }

  OutputSink table(config.table_path, out);
  WriteTableTsv(report, table.stream());
  table.Finish(config.table_path);
  if (!config.per_sim_path.empty()) {
    std::ofstream per_sim(config.per_sim_path);
    if (!per_sim) throw Error(ErrorCode::kIoError, "cannot write '" + config.per_sim_path + "'");
    WritePerSimTsv(report, per_sim);
    if (!per_sim) throw Error(ErrorCode::kIoError, "write failed for '" + config.per_sim_path + "'");
  }
}

void RunGenGraph(const GenGraphConfig& config, std::ostream& out) {
  const BipartiteGraph graph =
      GenerateUniformBipartiteGraph(config.n, config.m, config.d, config.seed);
  OutputSink sink(config.out_path, out);
  WriteEdgeList(graph, sink.stream());
  sink.Finish(config.out_path);
}

}  // namespace bipex::cli
