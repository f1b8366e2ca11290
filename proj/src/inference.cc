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

#include "bipex/inference.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "bipex/error.h"
#include "bipex/numeric.h"

namespace bipex {
namespace {

constexpr std::size_t kReplicateGrain = 8;

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::kBadAlpha,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

void CheckReplicateCount(std::size_t k) {
  if (k < 2) {
    throw Error(ErrorCode::kBadReplicateCount,
                "need at least 2 re-randomizations, got " + std::to_string(k));
  }
}

// Randomization-side weights for the projected engine:
// tau^k = (sum_r z_r coef[r] - offset) / n.
struct Projection {
  std::vector<double> coef;
  double offset = 0.0;
};

Projection Project(const BipartiteGraph& graph, const ExposureMoments& moments,
                   std::span<const double> values) {
  const std::size_t n = graph.num_analysis();
  const auto offsets = graph.row_offsets();
  const auto cols = graph.rand_indices();
  const auto weights = graph.weights();
  std::vector<CompensatedSum> coef(graph.num_rand());
  CompensatedSum offset;
  for (std::size_t i = 0; i < n; ++i) {
    const double scaled = values[i] / moments.var[i];
    offset.Add(scaled * moments.mean[i]);
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      coef[cols[e]].Add(weights[e] * scaled);
    }
  }
  Projection out;
  out.coef.reserve(coef.size());
  for (const auto& c : coef) out.coef.push_back(c.Value());
  out.offset = offset.Value();
  return out;
}

double ProjectedEstimate(const Projection& proj, std::span<const double> z,
                         double inv_n) {
  CompensatedSum sum;
  for (std::size_t r = 0; r < z.size(); ++r) {
    if (z[r] != 0.0) sum.Add(proj.coef[r]);
  }
  sum.Add(-proj.offset);
  return sum.Value() * inv_n;
}

struct Adjustment {
  double lambda = 0.0;
  CaVariance ca;
  std::vector<std::string> warnings;
};

Adjustment ResolveAdjustment(const VarianceReport& vr) {
  Adjustment adj;
  adj.lambda = OptimalLambda(*vr.cov_rv, *vr.var_rv_f);
  if (*vr.var_rv_f < kLambdaVarianceFloor) {
    adj.warnings.push_back(
        "covariate estimate has no randomization variance; lambda set to 0");
  }
  adj.ca = CaVarianceFromComponents(vr.var_rv_erl, *vr.cov_rv, *vr.var_rv_f,
                                    adj.lambda);
  if (adj.ca.clipped) {
    adj.warnings.push_back("adjusted variance was negative; clipped to 0");
  }
  if (adj.ca.variance == 0.0 && vr.var_rv_erl > 0.0) {
    adj.warnings.push_back(
        "degenerate adjustment: covariate fully explains the replicate variance");
  }
  return adj;
}

}  // namespace

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kRV: return "RV";
    case Method::kRVCA: return "RV_CA";
    case Method::kSN: return "SN";
  }
  return "?";
}

std::optional<Method> ParseMethod(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "rv") return Method::kRV;
  if (lower == "rv_ca") return Method::kRVCA;
  if (lower == "sn") return Method::kSN;
  return std::nullopt;
}

ReplicateDraws RandomizationReplicates(const BipartiteGraph& graph,
                                       const Design& design,
                                       const ExposureMoments& moments,
                                       std::span<const double> y,
                                       std::optional<std::span<const double>> f,
                                       const ReplicateOptions& options) {
  CheckReplicateCount(options.k);
  const std::size_t n = graph.num_analysis();
  const std::size_t m = graph.num_rand();
  if (y.size() != n || (f && f->size() != n)) {
    throw Error(ErrorCode::kLengthMismatch, "outcome length does not match n");
  }
  if (n == 0) throw Error(ErrorCode::kEmptyPanel, "no analysis units");

  // Validates the moments (DegenerateExposure) before any replicate runs.
  const PointEstimator estimator(graph, moments);

  ReplicateDraws draws;
  draws.k_count = options.k;
  draws.tau_erl_k.assign(options.k, 0.0);
  if (f) draws.tau_f_k.emplace(options.k, 0.0);
  const std::span<const double> f_span = f ? *f : std::span<const double>();

  std::optional<Projection> proj_y;
  std::optional<Projection> proj_f;
  if (options.engine == ReplicateEngine::kProjected) {
    proj_y = Project(graph, moments, y);
    if (f) proj_f = Project(graph, moments, *f);
  }
  const double inv_n = 1.0 / static_cast<double>(n);

  ParallelForBlocks(
      options.k, kReplicateGrain, options.threads,
      [&](std::size_t begin, std::size_t end) {
        std::vector<double> z(m);
        for (std::size_t k = begin; k < end; ++k) {
          DrawAssignmentInto(design, options.master_seed, k + 1, z);
          if (proj_y) {
            draws.tau_erl_k[k] = ProjectedEstimate(*proj_y, z, inv_n);
            if (proj_f) (*draws.tau_f_k)[k] = ProjectedEstimate(*proj_f, z, inv_n);
          } else {
            const auto est = estimator.Compute(z, y, f_span);
            draws.tau_erl_k[k] = est.tau_erl;
            if (f) (*draws.tau_f_k)[k] = est.tau_f;
          }
        }
      });
  return draws;
}

VarianceReport RvVariance(const ReplicateDraws& draws) {
  const std::size_t k = draws.tau_erl_k.size();
  CheckReplicateCount(k);
  if (draws.tau_f_k && draws.tau_f_k->size() != k) {
    throw Error(ErrorCode::kLengthMismatch, "replicate sequences differ in length");
  }
  const double inv_k = 1.0 / static_cast<double>(k);
  const double mean_erl = CompensatedTotal(draws.tau_erl_k) * inv_k;

  VarianceReport report;
  CompensatedSum ss_erl;
  for (double t : draws.tau_erl_k) ss_erl.Add((t - mean_erl) * (t - mean_erl));
  report.var_rv_erl = ss_erl.Value() * inv_k;

  if (draws.tau_f_k) {
    const auto& tf = *draws.tau_f_k;
    const double mean_f = CompensatedTotal(tf) * inv_k;
    CompensatedSum ss_f, cross;
    for (std::size_t i = 0; i < k; ++i) {
      const double df = tf[i] - mean_f;
      ss_f.Add(df * df);
      cross.Add((draws.tau_erl_k[i] - mean_erl) * df);
    }
    report.var_rv_f = ss_f.Value() * inv_k;
    report.cov_rv = cross.Value() * inv_k;
    report.lambda_hat = OptimalLambda(*report.cov_rv, *report.var_rv_f);
    report.var_rv_ca = CaVarianceFromComponents(report.var_rv_erl, *report.cov_rv,
                                                *report.var_rv_f, *report.lambda_hat)
                           .variance;
  }
  return report;
}

double NormalQuantile(double probability) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), probability);
}

ConfidenceInterval WaldCi(double point, double variance, double alpha,
                          Method method) {
  CheckAlpha(alpha);
  if (!(variance >= 0.0)) {
    throw Error(ErrorCode::kBadConfig,
                "variance must be nonnegative, got " + std::to_string(variance));
  }
  const double half = NormalQuantile(1.0 - alpha / 2.0) * std::sqrt(variance);
  ConfidenceInterval ci;
  ci.point = point;
  ci.lower = point - half;
  ci.upper = point + half;
  ci.alpha = alpha;
  ci.variance = variance;
  ci.method = method;
  return ci;
}

double SharpNullVariance(const BipartiteGraph& graph, const Design& design,
                         std::span<const double> y, std::span<const double> w) {
  const std::size_t n = graph.num_analysis();
  if (n == 0) throw Error(ErrorCode::kEmptyPanel, "no analysis units");
  if (y.size() != n || w.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "outcome or weight length does not match n");
  }
  const bool clustered = design.kind() == DesignKind::kIndependentCluster;
  if (clustered && design.cluster_of().size() != graph.num_rand()) {
    throw Error(ErrorCode::kBadDesign, "cluster map does not cover every randomization unit");
  }
  const std::size_t num_groups = clustered ? design.num_clusters() : graph.num_rand();
  const auto offsets = graph.row_offsets();
  const auto cols = graph.rand_indices();
  auto group_of = [&](std::size_t e) -> std::size_t {
    return clustered ? design.cluster_of()[cols[e]] : cols[e];
  };

  // Group -> analysis units touching it, each unit listed once per group.
  std::vector<std::size_t> group_offsets(num_groups + 1, 0);
  std::vector<std::size_t> last(num_groups, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::size_t c = group_of(e);
      if (last[c] != i) {
        last[c] = i;
        ++group_offsets[c + 1];
      }
    }
  }
  for (std::size_t c = 0; c < num_groups; ++c) group_offsets[c + 1] += group_offsets[c];
  std::vector<std::size_t> members(group_offsets[num_groups]);
  std::vector<std::size_t> fill(group_offsets.begin(), group_offsets.end() - 1);
  std::fill(last.begin(), last.end(), n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::size_t c = group_of(e);
      if (last[c] != i) {
        last[c] = i;
        members[fill[c]++] = i;
      }
    }
  }

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = y[i] * w[i];
  std::vector<std::size_t> seen(n, n);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum partners;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::size_t c = group_of(e);
      for (std::size_t k = group_offsets[c]; k < group_offsets[c + 1]; ++k) {
        const std::size_t j = members[k];
        if (seen[j] == i) continue;
        seen[j] = i;
        partners.Add(u[j]);
      }
    }
    total.Add(u[i] * partners.Value());
  }
  const double nn = static_cast<double>(n);
  return total.Value() / (nn * nn);
}

CaInferenceResult CaInference(const BipartiteGraph& graph, const Design& design,
                              const ExposureMoments& moments,
                              const OutcomePanel& panel,
                              std::span<const double> z_observed,
                              const ReplicateOptions& options, double alpha) {
  CheckAlpha(alpha);
  if (!panel.has_covariate()) {
    throw Error(ErrorCode::kMissingCovariates,
                "covariate-adjusted inference needs a covariate column");
  }
  ValidatePanel(panel, graph.num_analysis());

  CaInferenceResult out;
  const ReplicateDraws draws = RandomizationReplicates(
      graph, design, moments, panel.y, std::span<const double>(*panel.f), options);
  out.variance = RvVariance(draws);
  Adjustment adj = ResolveAdjustment(out.variance);
  out.warnings = std::move(adj.warnings);
  out.estimates = EstimateOnAssignment(graph, moments, panel, z_observed, adj.lambda);
  out.variance.var_rv_ca = adj.ca.variance;
  out.ci = WaldCi(out.estimates.tau_ca, adj.ca.variance, alpha, Method::kRVCA);
  return out;
}

AnalysisResult AnalyzeExperiment(const BipartiteGraph& graph,
                                 const Design& design,
                                 const ExposureMoments& moments,
                                 const OutcomePanel& panel,
                                 std::span<const double> z_observed,
                                 std::span<const Method> methods,
                                 const ReplicateOptions& options, double alpha) {
  CheckAlpha(alpha);
  if (methods.empty()) throw Error(ErrorCode::kBadConfig, "no methods requested");
  ValidatePanel(panel, graph.num_analysis());
  const bool want_ca =
      std::find(methods.begin(), methods.end(), Method::kRVCA) != methods.end();
  const bool want_rv =
      want_ca || std::find(methods.begin(), methods.end(), Method::kRV) != methods.end();
  if (want_ca && !panel.has_covariate()) {
    throw Error(ErrorCode::kMissingCovariates,
                "method RV_CA requested but the outcome panel has no covariate column");
  }
  if (want_rv) CheckReplicateCount(options.k);

  AnalysisResult out;
  out.estimates = EstimateOnAssignment(graph, moments, panel, z_observed, 0.0);

  if (want_rv) {
    std::optional<std::span<const double>> f;
    if (panel.has_covariate()) f = std::span<const double>(*panel.f);
    const ReplicateDraws draws =
        RandomizationReplicates(graph, design, moments, panel.y, f, options);
    out.rv = RvVariance(draws);
  }

  for (Method method : methods) {
    MethodResult r;
    r.method = method;
    switch (method) {
      case Method::kRV:
        r.point = out.estimates.tau_erl;
        r.variance = out.rv->var_rv_erl;
        if (r.variance == 0.0) r.warnings.push_back("randomization variance is zero");
        break;
      case Method::kRVCA: {
        Adjustment adj = ResolveAdjustment(*out.rv);
        const double lambda = adj.lambda;
        r.lambda_hat = lambda;
        r.warnings = std::move(adj.warnings);
        r.point = CaErlEstimate(out.estimates.tau_erl, out.estimates.tau_f, lambda);
        r.variance = adj.ca.variance;
        out.estimates.lambda = lambda;
        out.estimates.tau_ca = r.point;
        break;
      }
      case Method::kSN: {
        const ExposureProfile prof = ComputeExposures(graph, z_observed, moments);
        r.point = out.estimates.tau_erl;
        r.variance = SharpNullVariance(graph, design, panel.y, prof.weight);
        if (r.variance < 0.0) {
          r.variance = 0.0;
          r.warnings.push_back("sharp-null variance was negative; clipped to 0");
        }
        if (out.rv) out.rv->var_sn = r.variance;
        break;
      }
    }
    r.ci = WaldCi(r.point, r.variance, alpha, method);
    out.methods.push_back(std::move(r));
  }
  return out;
}

}  // namespace bipex
