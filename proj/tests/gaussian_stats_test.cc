// Copyright 2026 The FreD Authors
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

#include "fred/gaussian_stats.h"

#include <cmath>
#include <limits>

#include "Eigen/Eigenvalues"
#include "test_util.h"

namespace fred {
namespace {

using ::fred::testing::RandomMatrix;
using ::fred::testing::RandomSpd;
using ::fred::testing::StatusIs;

GaussianSummary OneDim(double mu, double var) {
  GaussianSummary s;
  s.mean = Eigen::VectorXd::Constant(1, mu);
  s.cov = Eigen::MatrixXd::Constant(1, 1, var);
  return s;
}

// Independent route: Tr((S1 S2)^1/2) as the sum of square roots of the
// eigenvalues of the nonsymmetric product.
double ProductRouteTraceTerm(const Eigen::MatrixXd& s1,
                             const Eigen::MatrixXd& s2) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(s1 * s2, /*computeEigenvectors=*/false);
  double root = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    root += std::sqrt(std::max(es.eigenvalues()(i).real(), 0.0));
  }
  return s1.trace() + s2.trace() - 2 * root;
}

TEST(EmpiricalSummaryTest, TwoPointExample) {
  Eigen::MatrixXd e(2, 2);
  e << 0, 0, 2, 2;
  auto s = EmpiricalSummary(e);
  ASSERT_OK(s);
  EXPECT_EQ(s->mean, Eigen::Vector2d(1, 1));
  EXPECT_EQ(s->cov, Eigen::Matrix2d::Ones());
  EXPECT_EQ(s->sample_count, 2);
}

TEST(EmpiricalSummaryTest, SingleRowHasZeroCovariance) {
  Eigen::MatrixXd e(1, 2);
  e << 3, -1;
  auto s = EmpiricalSummary(e);
  ASSERT_OK(s);
  EXPECT_EQ(s->mean, Eigen::Vector2d(3, -1));
  EXPECT_EQ(s->cov, Eigen::Matrix2d::Zero());
}

TEST(EmpiricalSummaryTest, OppositePoints) {
  Eigen::MatrixXd e(2, 2);
  e << 1, 0, -1, 0;
  auto s = EmpiricalSummary(e);
  ASSERT_OK(s);
  EXPECT_EQ(s->mean, Eigen::Vector2d(0, 0));
  Eigen::Matrix2d expected;
  expected << 1, 0, 0, 0;
  EXPECT_EQ(s->cov, expected);
}

TEST(EmpiricalSummaryTest, Errors) {
  EXPECT_THAT(EmpiricalSummary(Eigen::MatrixXd(0, 3)).status(),
              StatusIs(ErrorKind::kEmptyDataset));
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
  e(1, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THAT(EmpiricalSummary(e).status(), StatusIs(ErrorKind::kNonFinite));
  e(1, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THAT(EmpiricalSummary(e).status(), StatusIs(ErrorKind::kNonFinite));
}

TEST(EmpiricalSummaryTest, MatchesTwoPassOracleAndIsExactlySymmetric) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 1 + trial * 13, d = 1 + trial % 9;
    const Eigen::MatrixXd e = RandomMatrix(n, d, rng);
    auto s = EmpiricalSummary(e);
    ASSERT_OK(s);
    for (Eigen::Index i = 0; i < d; ++i) {
      double mi = 0;
      for (Eigen::Index r = 0; r < n; ++r) mi += e(r, i);
      mi /= n;
      EXPECT_NEAR(s->mean(i), mi, 1e-12);
      for (Eigen::Index j = 0; j < d; ++j) {
        double mj = 0, c = 0;
        for (Eigen::Index r = 0; r < n; ++r) mj += e(r, j);
        mj /= n;
        for (Eigen::Index r = 0; r < n; ++r) c += (e(r, i) - mi) * (e(r, j) - mj);
        EXPECT_NEAR(s->cov(i, j), c / n, 1e-12);
        EXPECT_EQ(s->cov(i, j), s->cov(j, i));
      }
    }
  }
}

TEST(EmpiricalSummaryTest, FloatInstantiation) {
  Eigen::MatrixXf e(2, 2);
  e << 0, 0, 2, 2;
  auto s = EmpiricalSummary(e);
  ASSERT_OK(s);
  EXPECT_FLOAT_EQ(s->cov(0, 1), 1.0f);
}

TEST(NearestPsdTest, ClampsNegativeEigenvalue) {
  auto p = NearestPsd(Eigen::Vector2d(1, -2).asDiagonal().toDenseMatrix());
  ASSERT_OK(p);
  EXPECT_TRUE(p->isApprox(Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix()));
}

TEST(NearestPsdTest, OffDiagonalSwap) {
  Eigen::Matrix2d m;
  m << 0, 1, 1, 0;
  auto p = NearestPsd(m);
  ASSERT_OK(p);
  EXPECT_LT((*p - Eigen::Matrix2d::Constant(0.5)).norm(), 1e-12);
}

TEST(NearestPsdTest, IdentityOnPsdInputs) {
  Rng rng(11);
  for (int d : {1, 2, 5, 16}) {
    const Eigen::MatrixXd s = RandomSpd(d, rng, 0.0);
    auto p = NearestPsd(s);
    ASSERT_OK(p);
    EXPECT_LE((*p - s).norm(), 1e-10);
  }
}

TEST(NearestPsdTest, SymmetrizesInput) {
  Eigen::Matrix2d m;
  m << 2, 1, 0, 2;
  auto p = NearestPsd(m);
  ASSERT_OK(p);
  EXPECT_EQ((*p)(0, 1), 0.5);
  EXPECT_EQ((*p)(1, 0), 0.5);
}

TEST(NearestPsdTest, RejectsNonSquareAndNonFinite) {
  EXPECT_THAT(NearestPsd(Eigen::MatrixXd::Zero(2, 3)).status(),
              StatusIs(ErrorKind::kDimensionMismatch));
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THAT(NearestPsd(m).status(), StatusIs(ErrorKind::kNonFinite));
}

TEST(NearestPsdPropertyTest, PsdSymmetricAndIdempotent) {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 1 + trial % 12;
    const Eigen::MatrixXd a = RandomMatrix(d, d, rng);
    auto p = NearestPsd(a);
    ASSERT_OK(p);
    EXPECT_EQ(*p, p->transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*p);
    const double tol =
        kPsdRelativeTolerance * eig.eigenvalues().cwiseAbs().maxCoeff();
    EXPECT_GE(eig.eigenvalues().minCoeff(), -tol);
    auto pp = NearestPsd(*p);
    ASSERT_OK(pp);
    EXPECT_LE((*pp - *p).norm(), 1e-10);
  }
}

// Exhaustive search over symmetric PSD [[a, b], [b, c]] with entries on a
// 0.01 grid in [-3, 3].
double GridBestDistance(const Eigen::Matrix2d& m) {
  constexpr double kStep = 0.01;
  double best = std::numeric_limits<double>::infinity();
  for (int ia = 0; ia <= 300; ++ia) {
    const double a = ia * kStep;
    for (int ic = 0; ic <= 300; ++ic) {
      const double c = ic * kStep;
      const double da = a - m(0, 0), dc = c - m(1, 1);
      const double base = da * da + dc * dc;
      if (base >= best) continue;
      const double bmax = std::sqrt(a * c);
      for (int ib = -300; ib <= 300; ++ib) {
        const double b = ib * kStep;
        if (std::abs(b) > bmax) continue;
        const double db = b - m(0, 1);
        best = std::min(best, base + 2 * db * db);
      }
    }
  }
  return std::sqrt(best);
}

TEST(NearestPsdPropertyTest, NoGridPointBeatsProjection) {
  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    Eigen::Matrix2d m;
    const double off = 2.0 * (rng.Uniform01() - 0.5) * 1.5;
    m << 3.0 * (rng.Uniform01() - 0.5), off, off, 3.0 * (rng.Uniform01() - 0.5);
    auto p = NearestPsd(m);
    ASSERT_OK(p);
    const double proj_dist = (*p - m).norm();
    EXPECT_GE(GridBestDistance(m), proj_dist - 0.01) << m;
  }
}

TEST(SqrtTraceTermTest, EqualInputsGiveZero) {
  Rng rng(3);
  for (int d : {1, 3, 8, 32}) {
    const Eigen::MatrixXd a = RandomSpd(d, rng);
    auto t = SqrtTraceTerm(a, a);
    ASSERT_OK(t);
    EXPECT_NEAR(*t, 0.0, 1e-8);
  }
}

TEST(SqrtTraceTermTest, DiagonalExample) {
  auto t = SqrtTraceTerm(Eigen::Vector2d(1, 4).asDiagonal().toDenseMatrix(),
                         Eigen::Vector2d(9, 1).asDiagonal().toDenseMatrix());
  ASSERT_OK(t);
  EXPECT_NEAR(*t, 5.0, 1e-12);
}

TEST(SqrtTraceTermTest, Errors) {
  EXPECT_THAT(SqrtTraceTerm(Eigen::MatrixXd::Identity(2, 2),
                            Eigen::MatrixXd::Identity(3, 3))
                  .status(),
              StatusIs(ErrorKind::kDimensionMismatch));
  EXPECT_THAT(SqrtTraceTerm(Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix(),
                            Eigen::MatrixXd::Identity(2, 2))
                  .status(),
              StatusIs(ErrorKind::kNotPsd));
  EXPECT_THAT(SqrtTraceTerm(Eigen::MatrixXd::Identity(2, 2),
                            Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix())
                  .status(),
              StatusIs(ErrorKind::kNotPsd));
}

TEST(SqrtTraceTermTest, ToleratesRoundingNegativeEigenvalues) {
  Eigen::Matrix2d a;
  a << 1, 0, 0, -1e-12;
  EXPECT_OK(SqrtTraceTerm(a, Eigen::Matrix2d::Identity()));
}

TEST(SqrtTraceTermPropertyTest, MatchesProductEigenvalueRoute) {
  Rng rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 1 + trial % 8;
    const Eigen::MatrixXd s1 = RandomSpd(d, rng), s2 = RandomSpd(d, rng);
    auto t = SqrtTraceTerm(s1, s2);
    ASSERT_OK(t);
    EXPECT_NEAR(*t, ProductRouteTraceTerm(s1, s2), 1e-8);
  }
}

TEST(SqrtTraceTermPropertyTest, DiagonalClosedForm) {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index d = 1 + trial % 16;
    Eigen::VectorXd v1(d), v2(d);
    double expected = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
      v1(i) = 5 * rng.Uniform01();
      v2(i) = 5 * rng.Uniform01();
      expected += v1(i) + v2(i) - 2 * std::sqrt(v1(i) * v2(i));
    }
    auto t = SqrtTraceTerm(v1.asDiagonal().toDenseMatrix(),
                           v2.asDiagonal().toDenseMatrix());
    ASSERT_OK(t);
    EXPECT_NEAR(*t, expected, 1e-10);
  }
}

TEST(FrechetDistanceTest, IdenticalSummaries) {
  Rng rng(2);
  GaussianSummary a{Eigen::VectorXd::Random(6), RandomSpd(6, rng), 10};
  auto f = FrechetDistance(a, a);
  ASSERT_OK(f);
  EXPECT_LE(std::abs(f->raw), 1e-8);
  EXPECT_GE(f->clamped, 0.0);
}

TEST(FrechetDistanceTest, OneDimensionalExample) {
  auto f = FrechetDistance(OneDim(0, 1), OneDim(3, 4));
  ASSERT_OK(f);
  EXPECT_NEAR(f->raw, 10.0, 1e-12);
  EXPECT_NEAR(f->mean_term, 9.0, 1e-12);
  EXPECT_NEAR(f->trace_term, 1.0, 1e-12);
}

TEST(FrechetDistanceTest, MeanShiftOnly) {
  GaussianSummary a{Eigen::Vector2d(0, 0), Eigen::Matrix2d::Identity(), 1};
  GaussianSummary b{Eigen::Vector2d(1, 1), Eigen::Matrix2d::Identity(), 1};
  auto f = FrechetDistance(a, b);
  ASSERT_OK(f);
  EXPECT_NEAR(f->raw, 2.0, 1e-12);
}

TEST(FrechetDistanceTest, DimensionMismatch) {
  EXPECT_THAT(FrechetDistance(OneDim(0, 1),
                              GaussianSummary{Eigen::Vector2d::Zero(),
                                              Eigen::Matrix2d::Identity(), 1})
                  .status(),
              StatusIs(ErrorKind::kDimensionMismatch));
}

TEST(FrechetDistancePropertyTest, OneDimensionalOracle) {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const double mu1 = 10 * rng.Normal(), mu2 = 10 * rng.Normal();
    const double v1 = 9 * rng.Uniform01(), v2 = 9 * rng.Uniform01();
    auto f = FrechetDistance(OneDim(mu1, v1), OneDim(mu2, v2));
    ASSERT_OK(f);
    const double ds = std::sqrt(v1) - std::sqrt(v2);
    EXPECT_NEAR(f->raw, (mu1 - mu2) * (mu1 - mu2) + ds * ds, 1e-10);
  }
}

TEST(FrechetDistancePropertyTest, SymmetricNonnegativeAndConsistent) {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index d = 1 + trial % 32;
    GaussianSummary a{RandomMatrix(d, 1, rng), RandomSpd(d, rng, 0.0), 1};
    GaussianSummary b{RandomMatrix(d, 1, rng), RandomSpd(d, rng, 0.0), 1};
    auto ab = FrechetDistance(a, b);
    auto ba = FrechetDistance(b, a);
    ASSERT_OK(ab);
    ASSERT_OK(ba);
    EXPECT_NEAR(ab->raw, ba->raw, 1e-8 * std::max(1.0, std::abs(ab->raw)));
    const double scale = a.cov.trace() + b.cov.trace();
    EXPECT_GE(ab->raw, -1e-6 * scale);
    EXPECT_EQ(ab->clamped, std::max(ab->raw, 0.0));
    EXPECT_NEAR(ab->raw, ab->mean_term + ab->trace_term,
                1e-12 * std::max(1.0, std::abs(ab->raw)));
    EXPECT_GE(ab->mean_term, 0.0);
  }
}

}  // namespace
}  // namespace fred
