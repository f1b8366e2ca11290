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

#ifndef BIPEX_NUMERIC_H_
#define BIPEX_NUMERIC_H_

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace bipex {

// Neumaier's variant of Kahan summation. Used for every length-n reduction.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double Value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double CompensatedTotal(std::span<const double> values);

// Runs body(begin, end) over contiguous blocks of [0, count). Block
// boundaries depend only on count and grain, never on the worker count, so
// any reduction done per block is reproducible across thread settings.
void ParallelForBlocks(std::size_t count, std::size_t grain, int threads,
                       const std::function<void(std::size_t, std::size_t)>& body);

// Resolves a user thread request; 0 means hardware concurrency.
int ResolveThreads(int requested);

}  // namespace bipex

#endif  // BIPEX_NUMERIC_H_
