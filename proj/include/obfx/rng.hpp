// Copyright 2026 The obfx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OBFX_RNG_HPP_
#define OBFX_RNG_HPP_

#include <cstdint>
#include <random>

namespace obfx {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds from a base
// seed and a counter so that per-record randomness does not depend on the
// order in which records are processed.
constexpr std::uint64_t MixSeed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream,
                                   std::uint64_t index = 0) {
  return MixSeed(MixSeed(MixSeed(base) ^ stream) ^ index);
}

// Stream tags for DeriveSeed. Keeping them in one place prevents two
// consumers from accidentally sharing a stream.
enum SeedStream : std::uint64_t {
  kStreamInit = 1,
  kStreamShuffle = 2,
  kStreamDropout = 3,
  kStreamNoise = 4,
  kStreamProbe = 5,
  kStreamSplit = 6,
  kStreamInject = 7,
  kStreamSynth = 8,
};

}  // namespace obfx

#endif  // OBFX_RNG_HPP_
