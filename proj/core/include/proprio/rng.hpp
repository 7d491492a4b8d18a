/*
 * Copyright 2026 The Proprio Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PROPRIO_RNG_HPP_
#define PROPRIO_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace proprio::rng {

// splitmix64 step (Steele, Lea, Flood 2014). Used both as a stream generator
// and as the mixing function for counter-based streams, so every random draw
// in the toolkit is a pure function of (seed, counters) and is reproducible
// across platforms; no libstdc++ distribution objects are involved anywhere.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix(mix(a, b), c);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                         std::uint64_t d) {
  return mix(mix(a, b, c), d);
}

// Small sequential generator over the splitmix64 orbit.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in (0, 1): 53 mantissa bits, offset so 0 is never returned.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
  }

  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

  // Box-Muller; one value per call, the pair partner is discarded to keep
  // the draw count predictable.
  double next_gaussian() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
  }

  // Uniform integer in [0, n). Modulo bias is ~n/2^64, irrelevant here.
  std::size_t next_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

 private:
  static constexpr double kTau = 6.28318530717958647692;
  std::uint64_t state_;
};

// Fisher-Yates with an explicit stream; std::shuffle's draw sequence is
// implementation-defined, this one is pinned.
template <typename T>
void shuffle(std::vector<T>& values, Stream& stream) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = stream.next_index(i);
    std::swap(values[i - 1], values[j]);
  }
}

inline std::vector<std::size_t> shuffled_indices(std::size_t n,
                                                 std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Stream stream(seed);
  shuffle(idx, stream);
  return idx;
}

// Single Gaussian draw keyed by counters; the basis of the per-sensor,
// per-timestep noise streams.
inline double gaussian_at(std::uint64_t key) {
  Stream stream(key);
  return stream.next_gaussian();
}

}  // namespace proprio::rng

#endif  // PROPRIO_RNG_HPP_
