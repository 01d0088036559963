// Copyright 2026 The PathForge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PATHFORGE_RNG_H_
#define PATHFORGE_RNG_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace pathforge {

// All sampling goes through std::mt19937_64, whose output sequence is fixed
// by the standard. The helpers below avoid the implementation-defined
// standard distributions so corpora are identical across toolchains.

inline uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Sub-seed for an independent stream keyed by `salt`.
inline uint64_t DeriveSeed(uint64_t seed, uint64_t salt) {
  return SplitMix64(seed ^ SplitMix64(salt + 0x632BE59BD9B4E019ULL));
}

// Uniform integer in [0, n) by rejection; n must be > 0.
inline uint64_t UniformBelow(std::mt19937_64 &rng, uint64_t n) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformUnit(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class T>
void Shuffle(std::vector<T> *items, std::mt19937_64 &rng) {
  for (size_t i = items->size(); i > 1; --i) {
    size_t j = UniformBelow(rng, i);
    std::swap((*items)[i - 1], (*items)[j]);
  }
}

}  // namespace pathforge

#endif  // PATHFORGE_RNG_H_
