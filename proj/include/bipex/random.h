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

#ifndef BIPEX_RANDOM_H_
#define BIPEX_RANDOM_H_

#include <cstdint>
#include <random>

namespace bipex {

// Random streams are std::mt19937_64 engines seeded with a single 64-bit
// word. Stream seeds are derived with MixSeed, so any (seed, stream) pair can
// be regenerated independently of execution order.
using Engine = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64/splitmix64";

constexpr std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream) {
  return SplitMix64(SplitMix64(seed) ^ SplitMix64(stream + 0xd1b54a32d192ed03ULL));
}

// Top 53 bits of one engine output, scaled to [0, 1).
inline double UniformUnit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace bipex

#endif  // BIPEX_RANDOM_H_
