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

#ifndef BIPEX_ESTIMATOR_H_
#define BIPEX_ESTIMATOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bipex/design.h"
#include "bipex/graph.h"

namespace bipex {

// Below this value a covariate estimate's variance is treated as zero and the
// adjustment coefficient falls back to 0 (plain ERL).
inline constexpr double kLambdaVarianceFloor = 1e-12;

// Observed outcomes and, optionally, a covariate projection f_i(X_i). The
// projection must be computed without experiment-period treatment data; this
// cannot be checked here and is the caller's responsibility.
struct OutcomePanel {
  std::vector<double> y;
  std::optional<std::vector<double>> f;

  bool has_covariate() const { return f.has_value(); }
};

// Throws LengthMismatch / ParseError when lengths differ from n or any entry
// is non-finite.
void ValidatePanel(const OutcomePanel& panel, std::size_t n);

struct ExposureProfile {
  std::vector<double> h;    // H_i(Z)
  std::vector<double> psi;  // (H_i - E[H_i]) / sqrt(V[H_i])
  // psi_i / sqrt(V[H_i]) = (H_i - E[H_i]) / V[H_i]; the estimator weight,
  // for which E[H_i weight_i] = 1.
  std::vector<double> weight;
};

struct PointEstimates {
  double tau_erl = 0.0;
  double tau_f = 0.0;
  double lambda = 0.0;
  double tau_ca = 0.0;
  bool adjusted = false;
};

// Throws DegenerateExposure naming the first unit whose exposure variance
// is zero.
void CheckExposureVariance(const ExposureMoments& moments,
                           const BipartiteGraph& graph);

ExposureProfile ComputeExposures(const BipartiteGraph& graph,
                                 std::span<const double> z,
                                 const ExposureMoments& moments);
ExposureProfile ComputeExposures(const BipartiteGraph& graph,
                                 const AssignmentVector& z,
                                 const ExposureMoments& moments);

// (1/n) sum_i y_i w_i, compensated, with w the exposure weights of an
// ExposureProfile. Throws EmptyPanel for n = 0.
double ErlEstimate(std::span<const double> y, std::span<const double> w);

// (1/n) sum_i f_i w_i.
double CovariateProjectionEstimate(std::span<const double> f,
                                   std::span<const double> w);

double CaErlEstimate(double tau_erl, double tau_f, double lambda);

// cov / var_f, or 0 when var_f < kLambdaVarianceFloor.
double OptimalLambda(double cov, double var_f);

struct CaVariance {
  double variance = 0.0;
  bool clipped = false;  // the raw quadratic was negative
};

// V[tau_erl] - 2 lambda Cov + lambda^2 V[tau_f], floored at zero.
CaVariance CaVarianceFromComponents(double var_erl, double cov, double var_f,
                                    double lambda);

// tau_erl and tau_f for one assignment without materialising the weights.
// This is the per-replicate hot path: O(edges) per call.
class PointEstimator {
 public:
  PointEstimator(const BipartiteGraph& graph, const ExposureMoments& moments);

  struct Result {
    double tau_erl = 0.0;
    double tau_f = 0.0;
  };

  // f may be empty, in which case tau_f is 0.
  Result Compute(std::span<const double> z, std::span<const double> y,
                 std::span<const double> f) const;

  const BipartiteGraph& graph() const { return *graph_; }

 private:
  const BipartiteGraph* graph_;
  std::vector<double> mean_;
  std::vector<double> inv_var_;
};

// Point estimates on the observed assignment; lambda is applied only when the
// panel carries a covariate.
PointEstimates EstimateOnAssignment(const BipartiteGraph& graph,
                                    const ExposureMoments& moments,
                                    const OutcomePanel& panel,
                                    std::span<const double> z, double lambda);

}  // namespace bipex

#endif  // BIPEX_ESTIMATOR_H_
