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

#ifndef FRED_DP_MECHANISMS_H_
#define FRED_DP_MECHANISMS_H_

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include "absl/strings/string_view.h"
#include <utility>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "fred/gaussian_stats.h"
#include "fred/random.h"
#include "fred/status.h"

namespace fred {

// l2 bound applied to every embedding before it enters a private statistic.
class ClipNorm {
 public:
  static absl::StatusOr<ClipNorm> Create(double c);

  double value() const { return c_; }

 private:
  explicit ClipNorm(double c) : c_(c) {}
  double c_;
};

// (epsilon, delta) with epsilon > 0 and 0 < delta < 1.
class PrivacyBudget {
 public:
  static absl::StatusOr<PrivacyBudget> Create(double epsilon, double delta);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  PrivacyBudget(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}
  double epsilon_;
  double delta_;
};

// Per-coordinate standard deviation of Gaussian noise.
struct NoiseScale {
  double tau = 0.0;
};

// How the per-mechanism noise scale is distributed over contributors.
//   kLiteral:    every sample (mean round) or client (covariance round) adds
//                N(0, tau^2) to its own contribution before aggregation.
//   kCalibrated: contributor noise is scaled so the noise on the aggregated
//                mean / covariance has standard deviation exactly tau.
//   kAudit:      no noise. Output is not private.
enum class NoiseMode { kLiteral, kCalibrated, kAudit };

absl::string_view NoiseModeName(NoiseMode mode);
absl::StatusOr<NoiseMode> ParseNoiseMode(absl::string_view name);

// v / max(1, ||v|| / c). The result satisfies ||result|| <= c in floating
// point, so clipping is exactly idempotent.
template <typename Derived>
absl::StatusOr<VectorX<typename Derived::Scalar>> Clip(
    const Eigen::MatrixBase<Derived>& v, ClipNorm c) {
  using Scalar = typename Derived::Scalar;
  if (!v.allFinite()) {
    return MakeError(ErrorKind::kNonFinite, "cannot clip a non-finite vector");
  }
  VectorX<Scalar> out = v;
  const Scalar bound = static_cast<Scalar>(c.value());
  const Scalar norm = out.norm();
  if (norm <= bound) return out;
  Scalar scale = norm / bound;
  out = v / scale;
  while (out.norm() > bound) {
    scale = std::nextafter(scale, std::numeric_limits<Scalar>::infinity());
    out = v / scale;
  }
  return out;
}

// Clips every row of an embedding matrix.
absl::StatusOr<EmbeddingMatrix> ClipRows(const EmbeddingMatrix& embeddings,
                                         ClipNorm c);

// (2c / n2) * sqrt(2 ln(1.25 / delta)) / epsilon: the Gaussian-mechanism scale
// for a mean of n2 vectors clipped to norm c.
absl::StatusOr<NoiseScale> MeanNoiseScale(ClipNorm c, int64_t n2,
                                          const PrivacyBudget& budget);

// (c^2 / n2) * sqrt(2 ln(1.25 / delta)) / epsilon: the scale for (1/n2) B^T B
// where every row of B has norm at most c.
absl::StatusOr<NoiseScale> CovNoiseScale(ClipNorm c, int64_t n2,
                                         const PrivacyBudget& budget);

// i.i.d. N(0, tau^2) per coordinate. tau == 0 returns zeros without drawing.
Eigen::VectorXd GaussianNoiseVector(Eigen::Index d, NoiseScale tau, Rng& rng);

// Upper triangle (with diagonal) i.i.d. N(0, tau^2), drawn row by row, then
// mirrored into the lower triangle.
Eigen::MatrixXd GaussianNoiseSymmetric(Eigen::Index d, NoiseScale tau,
                                       Rng& rng);

// Sequential composition: (sum of epsilons, sum of deltas).
absl::StatusOr<PrivacyBudget> ComposeSequential(
    std::span<const PrivacyBudget> budgets);

// Splits a total into (mean, covariance) budgets. mean_fraction of both
// epsilon and delta goes to the mean mechanism, the rest to the covariance
// mechanism; the two compose back to the total exactly or an error is
// returned.
absl::StatusOr<std::pair<PrivacyBudget, PrivacyBudget>> SplitBudget(
    const PrivacyBudget& total, double mean_fraction);

}  // namespace fred

#endif  // FRED_DP_MECHANISMS_H_
