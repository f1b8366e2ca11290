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

#include "bipex/design.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "bipex/error.h"
#include "bipex/numeric.h"
#include "bipex/random.h"

namespace bipex {
namespace {

void CheckProbability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::kBadDesign,
                "treatment probability must lie in (0, 1), got " + std::to_string(p));
  }
}

void CheckShape(const Design& design, std::size_t m) {
  if (design.kind() == DesignKind::kIndependentCluster &&
      design.cluster_of().size() != m) {
    throw Error(ErrorCode::kBadDesign,
                "cluster map covers " + std::to_string(design.cluster_of().size()) +
                    " randomization units, expected " + std::to_string(m));
  }
}

}  // namespace

Design Design::Bernoulli(double p) {
  CheckProbability(p);
  return Design(DesignKind::kIndependentBernoulli, p);
}

Design Design::UncheckedBernoulliForTesting(double p) {
  return Design(DesignKind::kIndependentBernoulli, p);
}

Design Design::Cluster(double p, std::span<const std::uint64_t> cluster_labels) {
  CheckProbability(p);
  Design d(DesignKind::kIndependentCluster, p);
  std::unordered_map<std::uint64_t, UnitIndex> dense;
  d.cluster_of_.reserve(cluster_labels.size());
  for (std::uint64_t label : cluster_labels) {
    auto [it, inserted] = dense.emplace(label, static_cast<UnitIndex>(dense.size()));
    d.cluster_of_.push_back(it->second);
  }
  d.num_clusters_ = dense.size();
  return d;
}

std::size_t Design::max_cluster_size() const {
  if (kind_ == DesignKind::kIndependentBernoulli) return 1;
  std::vector<std::size_t> sizes(num_clusters_, 0);
  for (UnitIndex c : cluster_of_) ++sizes[c];
  return sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

void DrawAssignmentInto(const Design& design, std::uint64_t master_seed,
                        std::uint64_t replicate, std::span<double> z) {
  CheckShape(design, z.size());
  Engine engine(MixSeed(master_seed, replicate));
  const double p = design.p();
  if (design.kind() == DesignKind::kIndependentBernoulli) {
    for (double& zr : z) zr = UniformUnit(engine) < p ? 1.0 : 0.0;
    return;
  }
  thread_local std::vector<double> cluster_draw;
  cluster_draw.resize(design.num_clusters());
  for (double& c : cluster_draw) c = UniformUnit(engine) < p ? 1.0 : 0.0;
  const auto cluster_of = design.cluster_of();
  for (std::size_t r = 0; r < z.size(); ++r) z[r] = cluster_draw[cluster_of[r]];
}

AssignmentVector DrawAssignment(const Design& design, std::size_t m,
                                std::uint64_t master_seed,
                                std::uint64_t replicate) {
  std::vector<double> buffer(m);
  DrawAssignmentInto(design, master_seed, replicate, buffer);
  AssignmentVector out;
  out.z.resize(m);
  for (std::size_t r = 0; r < m; ++r) out.z[r] = buffer[r] != 0.0 ? 1 : 0;
  out.seed_tag = MixSeed(master_seed, replicate);
  return out;
}

ExposureMoments ComputeExposureMoments(const BipartiteGraph& graph,
                                       const Design& design) {
  const std::size_t n = graph.num_analysis();
  CheckShape(design, graph.num_rand());
  const double p = design.p();
  const double q = p * (1.0 - p);
  const auto offsets = graph.row_offsets();
  const auto cols = graph.rand_indices();
  const auto weights = graph.weights();

  ExposureMoments mom;
  mom.mean.resize(n);
  mom.var.resize(n);

  if (design.kind() == DesignKind::kIndependentBernoulli) {
    for (std::size_t i = 0; i < n; ++i) {
      CompensatedSum sum, sum_sq;
      for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
        sum.Add(weights[e]);
        sum_sq.Add(weights[e] * weights[e]);
      }
      mom.mean[i] = p * sum.Value();
      mom.var[i] = q * sum_sq.Value();
    }
    return mom;
  }

  // Cluster design: within-row weights are first pooled by cluster.
  const auto cluster_of = design.cluster_of();
  std::vector<double> pooled(design.num_clusters(), 0.0);
  std::vector<UnitIndex> touched;
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum sum;
    touched.clear();
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const UnitIndex c = cluster_of[cols[e]];
      if (pooled[c] == 0.0) touched.push_back(c);
      pooled[c] += weights[e];
      sum.Add(weights[e]);
    }
    CompensatedSum sum_sq;
    for (UnitIndex c : touched) {
      sum_sq.Add(pooled[c] * pooled[c]);
      pooled[c] = 0.0;
    }
    mom.mean[i] = p * sum.Value();
    mom.var[i] = q * sum_sq.Value();
  }
  return mom;
}

}  // namespace bipex
