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

#include "fred/synth.h"

#include <string>
#include <vector>

#include "test_util.h"

namespace fred {
namespace {

using ::fred::testing::RandomMatrix;
using ::fred::testing::StatusIs;

TEST(ToyEmbedTest, DeterministicUnitRows) {
  const std::vector<std::string> corpus = {
      "how do I reverse a list", "the cat sat", "how do I reverse a list", "",
      "the cat sat on the mat"};
  auto e = ToyEmbed(corpus, 16);
  ASSERT_OK(e);
  ASSERT_EQ(e->rows(), 5);
  EXPECT_EQ(e->row(0), e->row(2));
  EXPECT_NE(e->row(1), e->row(4));
  for (Eigen::Index i = 0; i < e->rows(); ++i) {
    EXPECT_NEAR(e->row(i).norm(), 1.0, 1e-12);
  }
  EXPECT_EQ(e->row(3), Eigen::RowVectorXd::Unit(16, 0));
  EXPECT_EQ(*ToyEmbed(corpus, 16), *e);
}

TEST(ToyEmbedTest, PermutingCorpusPermutesRows) {
  const std::vector<std::string> corpus = {"alpha beta", "gamma", "delta x y"};
  const std::vector<std::string> permuted = {corpus[2], corpus[0], corpus[1]};
  auto a = ToyEmbed(corpus, 8);
  auto b = ToyEmbed(permuted, 8);
  ASSERT_OK(a);
  ASSERT_OK(b);
  EXPECT_EQ(b->row(0), a->row(2));
  EXPECT_EQ(b->row(1), a->row(0));
  EXPECT_EQ(b->row(2), a->row(1));
  EXPECT_FALSE(ToyEmbed(corpus, 0).ok());
}

TEST(SynthGaussianTest, RecoversMoments) {
  Eigen::Vector4d mean(1, -2, 0.5, 3);
  Eigen::Matrix4d cov;
  cov << 2.0, 0.3, 0.0, 0.1,  //
      0.3, 1.0, -0.2, 0.0,    //
      0.0, -0.2, 0.5, 0.0,    //
      0.1, 0.0, 0.0, 1.5;
  auto e = SynthGaussian(mean, cov, 100000, 42);
  ASSERT_OK(e);
  auto s = EmpiricalSummary(*e);
  ASSERT_OK(s);
  EXPECT_LT((s->mean - Eigen::VectorXd(mean)).norm(), 0.02);
  EXPECT_LT((s->cov - Eigen::MatrixXd(cov)).norm(), 0.05);
  EXPECT_EQ(*SynthGaussian(mean, cov, 10, 1), *SynthGaussian(mean, cov, 10, 1));
}

TEST(SynthGaussianTest, SingularCovarianceAllowed) {
  Eigen::Matrix2d cov;
  cov << 1, 1, 1, 1;
  auto e = SynthGaussian(Eigen::Vector2d::Zero(), cov, 100, 1);
  ASSERT_OK(e);
  EXPECT_LT((e->col(0) - e->col(1)).norm(), 1e-10);
}

TEST(SynthGaussianTest, Errors) {
  EXPECT_THAT(SynthGaussian(Eigen::Vector2d::Zero(),
                            Eigen::Vector2d(1, -1).asDiagonal().toDenseMatrix(),
                            5, 1)
                  .status(),
              StatusIs(ErrorKind::kNotPsd));
  EXPECT_THAT(SynthGaussian(Eigen::Vector3d::Zero(),
                            Eigen::Matrix2d::Identity(), 5, 1)
                  .status(),
              StatusIs(ErrorKind::kDimensionMismatch));
}

TEST(SynthMixtureTest, ExtremesComeFromOneSource) {
  Rng rng(1);
  const EmbeddingMatrix a = RandomMatrix(50, 2, rng);
  const EmbeddingMatrix b = RandomMatrix(50, 2, rng).array() + 100.0;
  MixtureSpec spec{a, b, 100.0, 30, 9};
  auto all_a = SynthMixture(spec);
  ASSERT_OK(all_a);
  EXPECT_EQ(all_a->rows(), 30);
  EXPECT_LT(all_a->maxCoeff(), 50.0);
  spec.percent_a = 0;
  auto all_b = SynthMixture(spec);
  ASSERT_OK(all_b);
  EXPECT_GT(all_b->minCoeff(), 50.0);
}

TEST(SynthMixtureTest, ExactCounts) {
  GaussianSource a{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
  GaussianSource b{Eigen::VectorXd::Constant(3, 1000.0),
                   Eigen::MatrixXd::Identity(3, 3)};
  for (double y : {0.0, 12.5, 25.0, 50.0, 99.0, 100.0}) {
    auto m = SynthMixture({a, b, y, 1001, 3});
    ASSERT_OK(m);
    ASSERT_EQ(m->rows(), 1001);
    int64_t from_a = 0;
    for (Eigen::Index i = 0; i < m->rows(); ++i) from_a += (*m)(i, 0) < 500.0;
    EXPECT_EQ(from_a, MixtureCountA(1001, y));
    EXPECT_EQ(from_a, static_cast<int64_t>(std::llround(1001 * y / 100.0)));
  }
  EXPECT_EQ(*SynthMixture({a, b, 40, 20, 5}), *SynthMixture({a, b, 40, 20, 5}));
}

TEST(SynthMixtureTest, Errors) {
  GaussianSource a{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2)};
  EXPECT_FALSE(SynthMixture({a, a, 101, 10, 1}).ok());
  EXPECT_FALSE(SynthMixture({a, a, -1, 10, 1}).ok());
  GaussianSource wide{Eigen::VectorXd::Zero(3), Eigen::MatrixXd::Identity(3, 3)};
  EXPECT_THAT(SynthMixture({a, wide, 50, 10, 1}).status(),
              StatusIs(ErrorKind::kDimensionMismatch));
  EXPECT_THAT(
      SynthMixture({EmbeddingMatrix(EmbeddingMatrix::Zero(3, 2)), a, 100, 10, 1})
          .status(),
      StatusIs(ErrorKind::kInsufficientRows));
}

}  // namespace
}  // namespace fred
