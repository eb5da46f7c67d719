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

// Synthetic embedding sources for tests and benchmarks.

#ifndef FRED_SYNTH_H_
#define FRED_SYNTH_H_

#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "fred/gaussian_stats.h"

namespace fred {

// Deterministic stand-in for a sentence embedder: lowercased alphanumeric
// tokens are hashed to pseudo-random directions in R^d, summed, and scaled to
// unit norm. A sentence with no tokens maps to e1.
absl::StatusOr<EmbeddingMatrix> ToyEmbed(std::span<const std::string> sentences,
                                         Eigen::Index d);

// n i.i.d. draws from N(mean, cov). cov may be singular but must be PSD.
absl::StatusOr<EmbeddingMatrix> SynthGaussian(const Eigen::VectorXd& mean,
                                              const Eigen::MatrixXd& cov,
                                              int64_t n, uint64_t seed);

struct GaussianSource {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Either a pool of rows (sampled without replacement) or a Gaussian.
using MixtureSource = std::variant<EmbeddingMatrix, GaussianSource>;

struct MixtureSpec {
  MixtureSource source_a;
  MixtureSource source_b;
  double percent_a = 100.0;  // Y in [0, 100]
  int64_t total_count = 0;
  uint64_t seed = 0;
};

// round(total_count * percent_a / 100)
int64_t MixtureCountA(int64_t total_count, double percent_a);

// Exactly MixtureCountA rows from source_a and the rest from source_b, in a
// seeded random order.
absl::StatusOr<EmbeddingMatrix> SynthMixture(const MixtureSpec& spec);

}  // namespace fred

#endif  // FRED_SYNTH_H_
