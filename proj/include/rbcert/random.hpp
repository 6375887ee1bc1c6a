// Copyright 2026 The rbcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RBCERT_RANDOM_HPP_
#define RBCERT_RANDOM_HPP_

#include <cstdint>
#include <limits>

namespace rbcert {

/// SplitMix64 (Steele, Lea & Flood): a counter-based 64-bit generator whose
/// output is a bijective mix of a Weyl sequence. Models
/// UniformRandomBitGenerator so it plugs into <random> distributions.
///
/// Every randomized routine in this library takes an Rng by reference and
/// has no other source of randomness; parallel callers split streams with
/// split() or derive_seed().
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return mix(state_ += kGamma); }

  /// An independent child stream; advances this generator by one draw.
  Rng split() { return Rng(mix((*this)())); }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

/// Seed for sub-stream `stream` of a run seeded with `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return Rng::mix(seed ^ Rng::mix(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace rbcert

#endif  // RBCERT_RANDOM_HPP_
