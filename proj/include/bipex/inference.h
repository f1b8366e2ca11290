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

#ifndef BIPEX_INFERENCE_H_
#define BIPEX_INFERENCE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bipex/design.h"
#include "bipex/estimator.h"
#include "bipex/graph.h"

namespace bipex {

enum class Method { kRV, kRVCA, kSN };

std::string_view MethodName(Method method);  // "RV", "RV_CA", "SN"
// Accepts rv, rv_ca, sn in any case.
std::optional<Method> ParseMethod(std::string_view name);

inline constexpr std::size_t kDefaultReplicates = 1000;
inline constexpr double kDefaultAlpha = 0.05;

// How each replicate's estimates are evaluated. kExposure recomputes every
// H_i and its weight (O(edges) per replicate). kProjected folds y_i / V[H_i] onto
// the randomization side once, after which a replicate is a length-m dot
// product; the two agree up to rounding.
enum class ReplicateEngine { kExposure, kProjected };

struct ReplicateOptions {
  std::size_t k = kDefaultReplicates;
  std::uint64_t master_seed = 0;
  int threads = 1;
  ReplicateEngine engine = ReplicateEngine::kExposure;
};

struct ReplicateDraws {
  std::size_t k_count = 0;
  std::vector<double> tau_erl_k;
  std::optional<std::vector<double>> tau_f_k;
};

// Re-draws the assignment K times from the design, holding y (and f) fixed,
// and records the ERL (and covariate) estimate of each draw. Replicate k uses
// stream (master_seed, k) for k = 1..K, so the output does not depend on the
// thread count.
ReplicateDraws RandomizationReplicates(const BipartiteGraph& graph,
                                       const Design& design,
                                       const ExposureMoments& moments,
                                       std::span<const double> y,
                                       std::optional<std::span<const double>> f,
                                       const ReplicateOptions& options);

struct VarianceReport {
  double var_rv_erl = 0.0;
  std::optional<double> var_rv_f;
  std::optional<double> cov_rv;
  std::optional<double> lambda_hat;
  std::optional<double> var_rv_ca;
  std::optional<double> var_sn;
};

// Divide-by-K central moments of the replicate estimates.
VarianceReport RvVariance(const ReplicateDraws& draws);

struct ConfidenceInterval {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double alpha = kDefaultAlpha;
  double variance = 0.0;
  Method method = Method::kRV;

  double width() const { return upper - lower; }
  bool Contains(double value) const { return lower <= value && value <= upper; }
};

// Standard normal quantile.
double NormalQuantile(double probability);

// point +/- z_{1 - alpha/2} sqrt(variance). Throws BadAlpha unless
// 0 < alpha < 1.
ConfidenceInterval WaldCi(double point, double variance, double alpha,
                          Method method = Method::kRV);

// Sharp-null analytical variance (1/n^2) sum y_i y_j w_i w_j over the
// observed exposure weights, taken over ordered pairs (i, j) whose
// exposures are dependent under the design: i and j touch a common
// randomization unit (Bernoulli) or a common cluster. Pairs with
// independent exposures have zero covariance and are left out. When every
// pair is dependent this is the squared ERL estimate. Cost is
// O(sum over clusters of squared analysis degree).
double SharpNullVariance(const BipartiteGraph& graph, const Design& design,
                         std::span<const double> y, std::span<const double> w);

struct CaInferenceResult {
  PointEstimates estimates;
  VarianceReport variance;
  ConfidenceInterval ci;
  std::vector<std::string> warnings;
};

// Covariate-adjusted randomization inference. Replicates estimate the
// variance terms and lambda; point estimates come from the observed z.
CaInferenceResult CaInference(const BipartiteGraph& graph, const Design& design,
                              const ExposureMoments& moments,
                              const OutcomePanel& panel,
                              std::span<const double> z_observed,
                              const ReplicateOptions& options, double alpha);

struct MethodResult {
  Method method = Method::kRV;
  double point = 0.0;
  double variance = 0.0;
  ConfidenceInterval ci;
  std::optional<double> lambda_hat;
  std::vector<std::string> warnings;
};

struct AnalysisResult {
  PointEstimates estimates;
  std::optional<VarianceReport> rv;
  std::vector<MethodResult> methods;
};

// Runs every requested method on one observed experiment, sharing a single
// replicate batch between RV and RV_CA.
AnalysisResult AnalyzeExperiment(const BipartiteGraph& graph,
                                 const Design& design,
                                 const ExposureMoments& moments,
                                 const OutcomePanel& panel,
                                 std::span<const double> z_observed,
                                 std::span<const Method> methods,
                                 const ReplicateOptions& options, double alpha);

}  // namespace bipex

#endif  // BIPEX_INFERENCE_H_
