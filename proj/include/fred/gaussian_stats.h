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

// Dense Gaussian summaries of embedding sets and the closed-form Frechet
// distance between them.
//
// Covariances in this library use the population divisor n, not n - 1. The
// private protocol releases (1/n) * sum of centered outer products, and the
// server-side summary mirrors that so both sides of a distance are computed
// with the same convention. Callers comparing against tools that default to
// the unbiased estimator (numpy.cov, scipy) must pass bias=True there.

#ifndef FRED_GAUSSIAN_STATS_H_
#define FRED_GAUSSIAN_STATS_H_

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "fred/status.h"

namespace fred {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// n x d, one embedding per row.
template <typename Scalar>
using EmbeddingMatrixT = MatrixX<Scalar>;
using EmbeddingMatrix = EmbeddingMatrixT<double>;

template <typename Scalar>
struct GaussianSummaryT {
  VectorX<Scalar> mean;
  MatrixX<Scalar> cov;  // exactly symmetric
  int64_t sample_count = 0;

  Eigen::Index dim() const { return mean.size(); }
};
using GaussianSummary = GaussianSummaryT<double>;

template <typename Scalar>
struct FrechetValueT {
  Scalar raw = 0;         // mean_term + trace_term; may be tiny-negative
  Scalar clamped = 0;     // max(raw, 0)
  Scalar mean_term = 0;   // squared distance between means
  Scalar trace_term = 0;  // Tr(S1 + S2 - 2 (S1 S2)^{1/2})
};
using FrechetValue = FrechetValueT<double>;

// Relative eigenvalue tolerance: eigenvalues >= -kPsdRelativeTolerance *
// spectral_radius count as nonnegative.
inline constexpr double kPsdRelativeTolerance = 1e-9;

template <typename Derived>
bool AllFinite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// (M + M^T) / 2. The result is exactly symmetric since floating-point
// addition commutes.
template <typename Derived>
MatrixX<typename Derived::Scalar> Symmetrize(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> out = (m + m.transpose()) * Scalar(0.5);
  return out;
}

template <typename Scalar>
Scalar PsdTolerance(const VectorX<Scalar>& eigenvalues) {
  if (eigenvalues.size() == 0) return Scalar(0);
  return Scalar(kPsdRelativeTolerance) * eigenvalues.cwiseAbs().maxCoeff();
}

template <typename Derived>
absl::StatusOr<GaussianSummaryT<typename Derived::Scalar>> EmpiricalSummary(
    const Eigen::MatrixBase<Derived>& embeddings) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = embeddings.rows();
  const Eigen::Index d = embeddings.cols();
  if (n == 0) {
    return MakeError(ErrorKind::kEmptyDataset,
                     "cannot summarize a dataset with zero rows");
  }
  if (d == 0) {
    return MakeError(ErrorKind::kDimensionMismatch, "embedding dim must be >= 1");
  }
  if (!embeddings.allFinite()) {
    return MakeError(ErrorKind::kNonFinite, "embeddings contain NaN or Inf");
  }
  GaussianSummaryT<Scalar> out;
  out.sample_count = n;
  out.mean = embeddings.colwise().mean().transpose();
  const MatrixX<Scalar> centered =
      embeddings.rowwise() - out.mean.transpose();
  out.cov = MatrixX<Scalar>::Zero(d, d);
  out.cov.template selfadjointView<Eigen::Lower>().rankUpdate(
      centered.transpose(), Scalar(1) / Scalar(n));
  out.cov = out.cov.template selfadjointView<Eigen::Lower>();
  return out;
}

// Frobenius-nearest symmetric PSD matrix: eigendecompose the symmetric part,
// clamp negative eigenvalues to zero, reconstruct. Inputs that are already
// PSD come back unchanged (after symmetrization).
template <typename Derived>
absl::StatusOr<MatrixX<typename Derived::Scalar>> NearestPsd(
    const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("matrix is ", m.rows(), "x", m.cols(),
                                  ", expected square"));
  }
  if (!m.allFinite()) {
    return MakeError(ErrorKind::kNonFinite, "matrix contains NaN or Inf");
  }
  MatrixX<Scalar> sym = Symmetrize(m);
  if (sym.size() == 0) return sym;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(sym);
  if (eig.info() != Eigen::Success) {
    return MakeError(ErrorKind::kEigenFailure,
                     "symmetric eigendecomposition did not converge");
  }
  // Eigenvalues are sorted ascending.
  if (eig.eigenvalues()(0) >= Scalar(0)) return sym;
  const VectorX<Scalar> clamped = eig.eigenvalues().cwiseMax(Scalar(0));
  const MatrixX<Scalar>& v = eig.eigenvectors();
  return Symmetrize(v * clamped.asDiagonal() * v.transpose());
}

namespace internal {

// Eigendecomposition of a symmetric matrix asserted to be PSD within the
// relative tolerance.
template <typename Scalar>
absl::StatusOr<Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>>> PsdEigen(
    const MatrixX<Scalar>& s, const char* which) {
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig(s);
  if (eig.info() != Eigen::Success) {
    return MakeError(ErrorKind::kEigenFailure,
                     absl::StrCat("eigendecomposition of ", which,
                                  " did not converge"));
  }
  const VectorX<Scalar>& lambda = eig.eigenvalues();
  if (lambda.size() > 0 && lambda(0) < -PsdTolerance<Scalar>(lambda)) {
    return MakeError(ErrorKind::kNotPsd,
                     absl::StrCat(which, " has eigenvalue ",
                                  static_cast<double>(lambda(0))));
  }
  return eig;
}

}  // namespace internal

// Tr(S1) + Tr(S2) - 2 Tr((S1 S2)^{1/2}), with the square-root trace taken
// through the symmetric sandwich S1^{1/2} S2 S1^{1/2}, which is similar to
// S1 S2 and therefore has the same eigenvalues.
template <typename Derived1, typename Derived2>
absl::StatusOr<typename Derived1::Scalar> SqrtTraceTerm(
    const Eigen::MatrixBase<Derived1>& s1,
    const Eigen::MatrixBase<Derived2>& s2) {
  using Scalar = typename Derived1::Scalar;
  if (s1.rows() != s1.cols() || s2.rows() != s2.cols() ||
      s1.rows() != s2.rows()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("covariances are ", s1.rows(), "x",
                                  s1.cols(), " and ", s2.rows(), "x",
                                  s2.cols()));
  }
  if (!s1.allFinite() || !s2.allFinite()) {
    return MakeError(ErrorKind::kNonFinite, "covariance contains NaN or Inf");
  }
  const MatrixX<Scalar> a = Symmetrize(s1);
  const MatrixX<Scalar> b = Symmetrize(s2);
  FRED_ASSIGN_OR_RETURN(auto eig_a, internal::PsdEigen<Scalar>(a, "S1"));
  FRED_RETURN_IF_ERROR(internal::PsdEigen<Scalar>(b, "S2").status());

  const VectorX<Scalar> root_lambda =
      eig_a.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  const MatrixX<Scalar>& v = eig_a.eigenvectors();
  const MatrixX<Scalar> root_a = v * root_lambda.asDiagonal() * v.transpose();
  const MatrixX<Scalar> sandwich = Symmetrize(root_a * b * root_a);

  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig_s(
      sandwich, Eigen::EigenvaluesOnly);
  if (eig_s.info() != Eigen::Success) {
    return MakeError(ErrorKind::kEigenFailure,
                     "eigendecomposition of S1^1/2 S2 S1^1/2 did not converge");
  }
  // The sandwich is PSD; negative eigenvalues are rounding residue.
  const Scalar root_trace =
      eig_s.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt().sum();
  return a.trace() + b.trace() - Scalar(2) * root_trace;
}

template <typename Scalar>
absl::StatusOr<FrechetValueT<Scalar>> FrechetDistance(
    const GaussianSummaryT<Scalar>& a, const GaussianSummaryT<Scalar>& b) {
  if (a.mean.size() != b.mean.size() || a.cov.rows() != a.mean.size() ||
      b.cov.rows() != b.mean.size()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("summaries have dims ", a.mean.size(),
                                  " and ", b.mean.size()));
  }
  FrechetValueT<Scalar> out;
  out.mean_term = (a.mean - b.mean).squaredNorm();
  FRED_ASSIGN_OR_RETURN(out.trace_term, SqrtTraceTerm(a.cov, b.cov));
  out.raw = out.mean_term + out.trace_term;
  out.clamped = std::max(out.raw, Scalar(0));
  return out;
}

}  // namespace fred

#endif  // FRED_GAUSSIAN_STATS_H_
