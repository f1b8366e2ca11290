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

#ifndef BIPEX_DESIGN_H_
#define BIPEX_DESIGN_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bipex/graph.h"

namespace bipex {

enum class DesignKind { kIndependentBernoulli, kIndependentCluster };

// Randomization mechanism over the m randomization units: either independent
// Bernoulli(p) per unit, or one Bernoulli(p) per cluster shared by its members.
class Design {
 public:
  static Design Bernoulli(double p);

  // cluster_labels[r] is an arbitrary label for randomization unit r; labels
  // are densely renumbered by first appearance.
  static Design Cluster(double p, std::span<const std::uint64_t> cluster_labels);

  // Skips the 0 < p < 1 check. Only meant for degenerate-boundary tests.
  static Design UncheckedBernoulliForTesting(double p);

  DesignKind kind() const { return kind_; }
  double p() const { return p_; }
  std::span<const UnitIndex> cluster_of() const { return cluster_of_; }
  std::size_t num_clusters() const { return num_clusters_; }
  std::size_t max_cluster_size() const;

 private:
  Design(DesignKind kind, double p) : kind_(kind), p_(p) {}

  DesignKind kind_;
  double p_;
  std::vector<UnitIndex> cluster_of_;
  std::size_t num_clusters_ = 0;
};

struct AssignmentVector {
  std::vector<std::uint8_t> z;
  // Stream seed of the draw; empty for observed assignments.
  std::optional<std::uint64_t> seed_tag;
};

// Replicate k of the stream rooted at master_seed. Pure function of its
// arguments.
AssignmentVector DrawAssignment(const Design& design, std::size_t m,
                                std::uint64_t master_seed,
                                std::uint64_t replicate);

// Same draw as DrawAssignment, written as 0.0/1.0 into z (size m).
void DrawAssignmentInto(const Design& design, std::uint64_t master_seed,
                        std::uint64_t replicate, std::span<double> z);

struct ExposureMoments {
  std::vector<double> mean;  // E[H_i(Z)]
  std::vector<double> var;   // V[H_i(Z)]
};

// Exact first two moments of H_i(Z) = sum_r A_ir Z_r under the design.
ExposureMoments ComputeExposureMoments(const BipartiteGraph& graph,
                                       const Design& design);

}  // namespace bipex

#endif  // BIPEX_DESIGN_H_
