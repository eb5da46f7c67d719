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

#include "fred/dp_mechanisms.h"

#include <array>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace fred {
namespace {

// sqrt(2 ln(1.25 / delta)) / epsilon
double GaussianMultiplier(const PrivacyBudget& budget) {
  return std::sqrt(2.0 * std::log(1.25 / budget.delta())) / budget.epsilon();
}

absl::Status CheckPopulation(int64_t n2) {
  if (n2 <= 0) {
    return MakeError(ErrorKind::kZeroPopulation,
                     absl::StrCat("sample count must be >= 1, got ", n2));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<ClipNorm> ClipNorm::Create(double c) {
  if (!std::isfinite(c) || c <= 0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("clip norm must be positive and finite, got ",
                                  c));
  }
  return ClipNorm(c);
}

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon,
                                                    double delta) {
  if (!std::isfinite(epsilon) || epsilon <= 0) {
    return MakeError(ErrorKind::kInvalidBudget,
                     absl::StrCat("epsilon must be > 0, got ", epsilon));
  }
  if (!(delta > 0 && delta < 1)) {
    return MakeError(ErrorKind::kInvalidBudget,
                     absl::StrCat("delta must be in (0, 1), got ", delta));
  }
  return PrivacyBudget(epsilon, delta);
}

absl::string_view NoiseModeName(NoiseMode mode) {
  switch (mode) {
    case NoiseMode::kLiteral:
      return "literal";
    case NoiseMode::kCalibrated:
      return "calibrated";
    case NoiseMode::kAudit:
      return "audit";
  }
  return "unknown";
}

absl::StatusOr<NoiseMode> ParseNoiseMode(absl::string_view name) {
  for (NoiseMode mode :
       {NoiseMode::kLiteral, NoiseMode::kCalibrated, NoiseMode::kAudit}) {
    if (name == NoiseModeName(mode)) return mode;
  }
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown noise mode '", name,
                                "' (expected literal, calibrated or audit)"));
}

absl::StatusOr<EmbeddingMatrix> ClipRows(const EmbeddingMatrix& embeddings,
                                         ClipNorm c) {
  EmbeddingMatrix out(embeddings.rows(), embeddings.cols());
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    FRED_ASSIGN_OR_RETURN(Eigen::VectorXd row,
                          Clip(embeddings.row(i).transpose(), c));
    out.row(i) = row.transpose();
  }
  return out;
}

absl::StatusOr<NoiseScale> MeanNoiseScale(ClipNorm c, int64_t n2,
                                          const PrivacyBudget& budget) {
  FRED_RETURN_IF_ERROR(CheckPopulation(n2));
  return NoiseScale{(2.0 * c.value() / static_cast<double>(n2)) *
                    GaussianMultiplier(budget)};
}

absl::StatusOr<NoiseScale> CovNoiseScale(ClipNorm c, int64_t n2,
                                         const PrivacyBudget& budget) {
  FRED_RETURN_IF_ERROR(CheckPopulation(n2));
  return NoiseScale{(c.value() * c.value() / static_cast<double>(n2)) *
                    GaussianMultiplier(budget)};
}

Eigen::VectorXd GaussianNoiseVector(Eigen::Index d, NoiseScale tau,
                                    Rng& rng) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(d);
  if (tau.tau == 0) return out;
  for (Eigen::Index i = 0; i < d; ++i) out(i) = tau.tau * rng.Normal();
  return out;
}

Eigen::MatrixXd GaussianNoiseSymmetric(Eigen::Index d, NoiseScale tau,
                                       Rng& rng) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, d);
  if (tau.tau == 0) return out;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      out(i, j) = tau.tau * rng.Normal();
      out(j, i) = out(i, j);
    }
  }
  return out;
}

absl::StatusOr<PrivacyBudget> ComposeSequential(
    std::span<const PrivacyBudget> budgets) {
  if (budgets.empty()) {
    return MakeError(ErrorKind::kEmptyList, "no budgets to compose");
  }
  double epsilon = 0;
  double delta = 0;
  for (const PrivacyBudget& b : budgets) {
    epsilon += b.epsilon();
    delta += b.delta();
  }
  return PrivacyBudget::Create(epsilon, delta);
}

absl::StatusOr<std::pair<PrivacyBudget, PrivacyBudget>> SplitBudget(
    const PrivacyBudget& total, double mean_fraction) {
  if (!(mean_fraction > 0 && mean_fraction < 1)) {
    return MakeError(ErrorKind::kInvalidBudget,
                     absl::StrCat("budget split must be in (0, 1), got ",
                                  mean_fraction));
  }
  const double eps_mean = total.epsilon() * mean_fraction;
  const double delta_mean = total.delta() * mean_fraction;
  FRED_ASSIGN_OR_RETURN(PrivacyBudget mean,
                        PrivacyBudget::Create(eps_mean, delta_mean));
  FRED_ASSIGN_OR_RETURN(
      PrivacyBudget cov,
      PrivacyBudget::Create(total.epsilon() - eps_mean,
                            total.delta() - delta_mean));
  const std::array parts = {mean, cov};
  FRED_ASSIGN_OR_RETURN(PrivacyBudget recomposed, ComposeSequential(parts));
  if (!(recomposed == total)) {
    return MakeError(ErrorKind::kInvalidBudget,
                     absl::StrCat("split ", mean_fraction,
                                  " does not recompose to the total exactly"));
  }
  return std::make_pair(mean, cov);
}

}  // namespace fred
