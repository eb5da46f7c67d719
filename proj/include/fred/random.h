//
// Copyright 2026 The FreD Authors
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
//

#ifndef FRED_RANDOM_H_
#define FRED_RANDOM_H_

#include <cstdint>
#include <random>

namespace fred {

// Seeded generator with deterministic stream splitting. A child stream is a
// pure function of the parent's seed and the stream label, never of how many
// values the parent has produced, so forking per client makes results
// independent of client evaluation order.
class Rng {
 public:
  using result_type = std::mt19937_64::result_type;

  explicit Rng(uint64_t seed);

  Rng Fork(uint64_t stream) const;

  uint64_t seed() const { return seed_; }

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  // Standard normal draw.
  double Normal() { return normal_(engine_); }
  double Uniform01() { return std::generate_canonical<double, 64>(engine_); }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

uint64_t SplitMix64(uint64_t x);

}  // namespace fred

#endif  // FRED_RANDOM_H_
