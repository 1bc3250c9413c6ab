// Copyright 2026 The Graphfuzz Authors
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

#ifndef GRAPHFUZZ_RNG_H_
#define GRAPHFUZZ_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace graphfuzz {

// SplitMix64 finalizer; used to derive independent stream seeds.
uint64_t Mix64(uint64_t x);
uint64_t DeriveSeed(uint64_t base, uint64_t stream);

// Deterministic random source. The engine's output sequence is fixed by the
// standard and the draw helpers below are hand-written, so every draw is
// reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform in [0, n); n must be > 0.
  uint64_t Below(uint64_t n);
  // Uniform in [lo, hi], inclusive.
  int64_t Uniform(int64_t lo, int64_t hi);
  // Uniform in [0, 1) with 53 random bits.
  double UniformDouble();
  bool Bernoulli(double p) { return UniformDouble() < p; }

  template <typename T>
  const T& Pick(const std::vector<T>& items) {
    return items[Below(items.size())];
  }

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[Below(i)]);
    }
  }

  // Index drawn proportionally to nonnegative weights (not all zero).
  size_t Weighted(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace graphfuzz

#endif  // GRAPHFUZZ_RNG_H_
