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

#include "bipex/estimator.h"

#include <cmath>
#include <string>

#include "bipex/error.h"
#include "bipex/numeric.h"

namespace bipex {
namespace {

double WeightedMean(std::span<const double> values, std::span<const double> w) {
  if (values.size() != w.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "length " + std::to_string(values.size()) + " vs exposure length " +
                    std::to_string(w.size()));
  }
  if (values.empty()) throw Error(ErrorCode::kEmptyPanel, "no analysis units");
  CompensatedSum sum;
  for (std::size_t i = 0; i < values.size(); ++i) sum.Add(values[i] * w[i]);
  return sum.Value() / static_cast<double>(values.size());
}

std::vector<double> ToDouble(const AssignmentVector& z) {
  return std::vector<double>(z.z.begin(), z.z.end());
}

}  // namespace

void ValidatePanel(const OutcomePanel& panel, std::size_t n) {
  if (panel.y.size() != n) {
    throw Error(ErrorCode::kLengthMismatch,
                "outcome length " + std::to_string(panel.y.size()) +
                    " does not match n = " + std::to_string(n));
  }
  if (panel.f && panel.f->size() != n) {
    throw Error(ErrorCode::kLengthMismatch,
                "covariate length " + std::to_string(panel.f->size()) +
                    " does not match n = " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(panel.y[i]) || (panel.f && !std::isfinite((*panel.f)[i]))) {
      throw Error(ErrorCode::kParseError,
                  "non-finite outcome or covariate at unit " + std::to_string(i));
    }
  }
}

void CheckExposureVariance(const ExposureMoments& moments,
                           const BipartiteGraph& graph) {
  for (std::size_t i = 0; i < moments.var.size(); ++i) {
    if (!(moments.var[i] > 0.0)) {
      const std::string id =
          i < graph.num_analysis() ? graph.analysis_ids()[i] : std::to_string(i);
      throw Error(ErrorCode::kDegenerateExposure,
                  "analysis unit " + id + " (index " + std::to_string(i) +
                      ") has zero exposure variance");
    }
  }
}

ExposureProfile ComputeExposures(const BipartiteGraph& graph,
                                 std::span<const double> z,
                                 const ExposureMoments& moments) {
  const std::size_t n = graph.num_analysis();
  if (z.size() != graph.num_rand()) {
    throw Error(ErrorCode::kLengthMismatch,
                "assignment length " + std::to_string(z.size()) +
                    " does not match m = " + std::to_string(graph.num_rand()));
  }
  if (moments.mean.size() != n || moments.var.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "exposure moments do not match n");
  }
  CheckExposureVariance(moments, graph);

  const auto offsets = graph.row_offsets();
  const auto cols = graph.rand_indices();
  const auto weights = graph.weights();
  ExposureProfile out;
  out.h.resize(n);
  out.psi.resize(n);
  out.weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) h += weights[e] * z[cols[e]];
    const double sd = std::sqrt(moments.var[i]);
    out.h[i] = h;
    out.psi[i] = (h - moments.mean[i]) / sd;
    out.weight[i] = out.psi[i] / sd;
  }
  return out;
}

ExposureProfile ComputeExposures(const BipartiteGraph& graph,
                                 const AssignmentVector& z,
                                 const ExposureMoments& moments) {
  const std::vector<double> zd = ToDouble(z);
  return ComputeExposures(graph, zd, moments);
}

double ErlEstimate(std::span<const double> y, std::span<const double> w) {
  return WeightedMean(y, w);
}

double CovariateProjectionEstimate(std::span<const double> f,
                                   std::span<const double> w) {
  return WeightedMean(f, w);
}

double CaErlEstimate(double tau_erl, double tau_f, double lambda) {
  return tau_erl - lambda * tau_f;
}

double OptimalLambda(double cov, double var_f) {
  if (var_f < kLambdaVarianceFloor) return 0.0;
  return cov / var_f;
}

CaVariance CaVarianceFromComponents(double var_erl, double cov, double var_f,
                                    double lambda) {
  const double v = var_erl - 2.0 * lambda * cov + lambda * lambda * var_f;
  if (v < 0.0) return {0.0, true};
  return {v, false};
}

PointEstimator::PointEstimator(const BipartiteGraph& graph,
                               const ExposureMoments& moments)
    : graph_(&graph), mean_(moments.mean) {
  const std::size_t n = graph.num_analysis();
  if (moments.mean.size() != n || moments.var.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "exposure moments do not match n");
  }
  CheckExposureVariance(moments, graph);
  inv_var_.resize(n);
  for (std::size_t i = 0; i < n; ++i) inv_var_[i] = 1.0 / moments.var[i];
}

PointEstimator::Result PointEstimator::Compute(std::span<const double> z,
                                               std::span<const double> y,
                                               std::span<const double> f) const {
  const std::size_t n = graph_->num_analysis();
  if (n == 0) throw Error(ErrorCode::kEmptyPanel, "no analysis units");
  const auto offsets = graph_->row_offsets();
  const auto cols = graph_->rand_indices();
  const auto weights = graph_->weights();
  const bool with_f = !f.empty();

  CompensatedSum sum_y;
  CompensatedSum sum_f;
  for (std::size_t i = 0; i < n; ++i) {
    double h = 0.0;
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) h += weights[e] * z[cols[e]];
    const double w = (h - mean_[i]) * inv_var_[i];
    sum_y.Add(y[i] * w);
    if (with_f) sum_f.Add(f[i] * w);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return {sum_y.Value() * inv_n, with_f ? sum_f.Value() * inv_n : 0.0};
}

PointEstimates EstimateOnAssignment(const BipartiteGraph& graph,
                                    const ExposureMoments& moments,
                                    const OutcomePanel& panel,
                                    std::span<const double> z, double lambda) {
  ValidatePanel(panel, graph.num_analysis());
  if (z.size() != graph.num_rand()) {
    throw Error(ErrorCode::kLengthMismatch, "assignment length does not match m");
  }
  const PointEstimator estimator(graph, moments);
  const std::span<const double> f =
      panel.f ? std::span<const double>(*panel.f) : std::span<const double>();
  const auto raw = estimator.Compute(z, panel.y, f);
  PointEstimates out;
  out.tau_erl = raw.tau_erl;
  out.tau_f = raw.tau_f;
  out.adjusted = panel.has_covariate();
  out.lambda = out.adjusted ? lambda : 0.0;
  out.tau_ca = CaErlEstimate(out.tau_erl, out.tau_f, out.lambda);
  return out;
}

}  // namespace bipex
