// Copyright 2026 The densim Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace densim {

/// SplitMix64: a counter-based 64-bit generator (Weyl sequence plus a
/// mixing finalizer). Chosen over the std engines because its output is
/// fully specified, so seeded runs are bit-reproducible independent of
/// the standard library, and streams can be split cheaply.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller (kept in-library so distributions are
  /// reproducible across standard library versions).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_pos();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  /// Index drawn from the categorical distribution given by `probs`
  /// (assumed nonnegative, summing to ~1; the final bin absorbs roundoff).
  std::size_t categorical(std::span<const double> probs) {
    if (probs.empty()) throw std::invalid_argument("categorical: empty distribution");
    double u = uniform();
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
      acc += probs[k];
      if (u < acc) return k;
    }
    return probs.size() - 1;
  }

  /// Derives the seed of an independent stream. Feeding the same
  /// (seed, stream) pair always yields the same substream; distinct
  /// stream indices decorrelate through two extra mixing rounds.
  static std::uint64_t split(std::uint64_t seed, std::uint64_t stream) {
    Rng h(seed ^ 0xD1B54A32D192ED03ull);
    std::uint64_t a = h.next_u64();
    Rng g(a + stream * 0x9E3779B97F4A7C15ull);
    g.next_u64();
    return g.next_u64();
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace densim
