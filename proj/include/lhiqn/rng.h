// Copyright 2026 The LH-IQN Authors
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

#ifndef LHIQN_RNG_H_
#define LHIQN_RNG_H_

#include <cstdint>
#include <random>

namespace lhiqn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive independent sub-seeds from a master
// seed: DeriveSeed(master, stream) for stream ids listed in SeedStream.
inline std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class SeedStream : std::uint64_t {
  kEnv = 1,
  kAgent0 = 2,
  kAgent1 = 3,
  kReplay = 4,
  kEval = 5,
  kInit0 = 6,
  kInit1 = 7,
};

inline std::uint64_t DeriveSeed(std::uint64_t master, SeedStream stream,
                                std::uint64_t index = 0) {
  return MixSeed(MixSeed(master) ^ MixSeed(static_cast<std::uint64_t>(stream) +
                                           (index << 8)));
}

// Uniform in [0, 1). Avoids std::uniform_real_distribution so streams are
// identical across standard library implementations.
inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) by rejection sampling; n > 0.
inline std::uint64_t UniformIndex(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace lhiqn

#endif  // LHIQN_RNG_H_
