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

#include "fred/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "fred/random.h"
#include "fred/status.h"

namespace fred {
namespace {

uint64_t Fnv1a(absl::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> Tokenize(absl::string_view sentence) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : sentence) {
    if (absl::ascii_isalnum(static_cast<unsigned char>(ch))) {
      current.push_back(absl::ascii_tolower(static_cast<unsigned char>(ch)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

absl::StatusOr<Eigen::Index> SourceDim(const MixtureSource& source) {
  if (const auto* m = std::get_if<EmbeddingMatrix>(&source)) return m->cols();
  const auto& g = std::get<GaussianSource>(source);
  if (g.cov.rows() != g.mean.size() || g.cov.cols() != g.mean.size()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("gaussian source mean has dim ",
                                  g.mean.size(), ", cov is ", g.cov.rows(),
                                  "x", g.cov.cols()));
  }
  return g.mean.size();
}

absl::StatusOr<EmbeddingMatrix> DrawFrom(const MixtureSource& source,
                                         int64_t count, Rng rng) {
  if (const auto* pool = std::get_if<EmbeddingMatrix>(&source)) {
    if (count > pool->rows()) {
      return MakeError(ErrorKind::kInsufficientRows,
                       absl::StrCat("need ", count, " rows, pool has ",
                                    pool->rows()));
    }
    // Partial Fisher-Yates.
    std::vector<Eigen::Index> idx(static_cast<size_t>(pool->rows()));
    std::iota(idx.begin(), idx.end(), 0);
    for (int64_t i = 0; i < count; ++i) {
      std::uniform_int_distribution<int64_t> pick(i, pool->rows() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(static_cast<size_t>(count));
    return EmbeddingMatrix((*pool)(idx, Eigen::all));
  }
  const auto& g = std::get<GaussianSource>(source);
  return SynthGaussian(g.mean, g.cov, count, rng());
}

}  // namespace

absl::StatusOr<EmbeddingMatrix> ToyEmbed(std::span<const std::string> sentences,
                                         Eigen::Index d) {
  if (d < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "embedding dim must be >= 1");
  }
  EmbeddingMatrix out = EmbeddingMatrix::Zero(
      static_cast<Eigen::Index>(sentences.size()), d);
  for (size_t i = 0; i < sentences.size(); ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    for (const std::string& token : Tokenize(sentences[i])) {
      const uint64_t h = Fnv1a(token);
      for (Eigen::Index k = 0; k < d; ++k) {
        const uint64_t bits = SplitMix64(h + static_cast<uint64_t>(k));
        // Uniform in [-1, 1).
        v(k) += std::ldexp(static_cast<double>(bits >> 11), -52) - 1.0;
      }
    }
    const double norm = v.norm();
    if (norm > 0) {
      out.row(static_cast<Eigen::Index>(i)) = (v / norm).transpose();
    } else {
      out(static_cast<Eigen::Index>(i), 0) = 1.0;
    }
  }
  return out;
}

absl::StatusOr<EmbeddingMatrix> SynthGaussian(const Eigen::VectorXd& mean,
                                              const Eigen::MatrixXd& cov,
                                              int64_t n, uint64_t seed) {
  const Eigen::Index d = mean.size();
  if (cov.rows() != d || cov.cols() != d) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("mean has dim ", d, ", cov is ", cov.rows(),
                                  "x", cov.cols()));
  }
  if (n < 0) {
    return MakeError(ErrorKind::kInvalidArgument, "sample count must be >= 0");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Symmetrize(cov));
  if (eig.info() != Eigen::Success) {
    return MakeError(ErrorKind::kEigenFailure, "covariance eigensolve failed");
  }
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  if (d > 0 && lambda(0) < -PsdTolerance<double>(lambda)) {
    return MakeError(ErrorKind::kNotPsd,
                     absl::StrCat("covariance has eigenvalue ", lambda(0)));
  }
  const Eigen::MatrixXd factor =
      eig.eigenvectors() * lambda.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  Rng rng(seed);
  EmbeddingMatrix out(n, d);
  Eigen::VectorXd z(d);
  for (int64_t i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.Normal();
    out.row(i) = (mean + factor * z).transpose();
  }
  return out;
}

int64_t MixtureCountA(int64_t total_count, double percent_a) {
  return std::llround(static_cast<double>(total_count) * percent_a / 100.0);
}

absl::StatusOr<EmbeddingMatrix> SynthMixture(const MixtureSpec& spec) {
  if (!(spec.percent_a >= 0 && spec.percent_a <= 100)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("mixture percent must be in [0, 100], got ",
                                  spec.percent_a));
  }
  if (spec.total_count < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "mixture total_count must be >= 1");
  }
  FRED_ASSIGN_OR_RETURN(Eigen::Index dim_a, SourceDim(spec.source_a));
  FRED_ASSIGN_OR_RETURN(Eigen::Index dim_b, SourceDim(spec.source_b));
  if (dim_a != dim_b) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("mixture sources have dims ", dim_a, " and ",
                                  dim_b));
  }
  const int64_t count_a = MixtureCountA(spec.total_count, spec.percent_a);
  const int64_t count_b = spec.total_count - count_a;
  const Rng root(spec.seed);
  FRED_ASSIGN_OR_RETURN(EmbeddingMatrix a,
                        DrawFrom(spec.source_a, count_a, root.Fork(1)));
  FRED_ASSIGN_OR_RETURN(EmbeddingMatrix b,
                        DrawFrom(spec.source_b, count_b, root.Fork(2)));
  EmbeddingMatrix stacked(spec.total_count, dim_a);
  stacked.topRows(count_a) = a;
  stacked.bottomRows(count_b) = b;
  std::vector<Eigen::Index> order(static_cast<size_t>(spec.total_count));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng = root.Fork(3);
  std::shuffle(order.begin(), order.end(), shuffle_rng);
  return EmbeddingMatrix(stacked(order, Eigen::all));
}

}  // namespace fred
