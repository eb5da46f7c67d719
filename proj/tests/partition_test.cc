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

#include "fred/partition.h"

#include <algorithm>
#include <set>
#include <vector>

#include "test_util.h"

namespace fred {
namespace {

using ::fred::testing::RandomMatrix;
using ::fred::testing::StatusIs;
using ::testing::ElementsAre;
using ::testing::SizeIs;

std::vector<int64_t> Sizes(const std::vector<ClientDataset>& clients) {
  std::vector<int64_t> out;
  for (const auto& c : clients) out.push_back(c.rows());
  return out;
}

// Rows as sorted tuples, for multiset comparison.
std::vector<std::vector<double>> RowMultiset(const EmbeddingMatrix& m) {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.emplace_back();
    for (Eigen::Index j = 0; j < m.cols(); ++j) rows.back().push_back(m(i, j));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

std::vector<std::vector<double>> RowMultiset(
    const std::vector<ClientDataset>& clients) {
  std::vector<std::vector<double>> rows;
  for (const auto& c : clients) {
    auto r = RowMultiset(c.embeddings());
    rows.insert(rows.end(), r.begin(), r.end());
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

TEST(PartitionTest, RoundRobinSizes) {
  Rng rng(1);
  auto clients = Partition(RandomMatrix(10, 2, rng),
                           {PartitionStrategy::kRoundRobin, 3, 1.0, 0});
  ASSERT_OK(clients);
  EXPECT_THAT(Sizes(*clients), ElementsAre(4, 3, 3));
  EXPECT_EQ((*clients)[0].id(), ClientIdFor(0));
}

TEST(PartitionTest, SingleRowSingleClient) {
  EmbeddingMatrix m(1, 2);
  m << 7, 8;
  auto clients = Partition(m, {PartitionStrategy::kRoundRobin, 1, 1.0, 0});
  ASSERT_OK(clients);
  ASSERT_THAT(*clients, SizeIs(1));
  EXPECT_EQ((*clients)[0].embeddings(), m);
}

TEST(PartitionTest, EmptyInputRejected) {
  EXPECT_THAT(Partition(EmbeddingMatrix(0, 2), {}).status(),
              StatusIs(ErrorKind::kEmptyInput));
  EXPECT_FALSE(
      Partition(EmbeddingMatrix::Ones(3, 2),
                {PartitionStrategy::kRoundRobin, 0, 1.0, 0})
          .ok());
}

TEST(PartitionTest, ByLabelGroupsRows) {
  EmbeddingMatrix m(6, 1);
  m << 0, 1, 2, 3, 4, 5;
  const std::vector<int64_t> labels = {7, 3, 7, 3, 9, 9};
  auto clients =
      Partition(m, {PartitionStrategy::kByLabel, 3, 1.0, 0}, labels);
  ASSERT_OK(clients);
  ASSERT_THAT(*clients, SizeIs(3));
  // Labels sorted: 3 -> client 0, 7 -> client 1, 9 -> client 2.
  EXPECT_EQ((*clients)[0].embeddings(), Eigen::Vector2d(1, 3));
  EXPECT_EQ((*clients)[1].embeddings(), Eigen::Vector2d(0, 2));
  EXPECT_EQ((*clients)[2].embeddings(), Eigen::Vector2d(4, 5));
  const std::vector<int64_t> short_labels = {1, 2};
  EXPECT_FALSE(
      Partition(m, {PartitionStrategy::kByLabel, 3, 1.0, 0}, short_labels)
          .ok());
}

TEST(PartitionTest, DirichletLargeAlphaIsNearUniform) {
  constexpr int kN = 10000;
  constexpr int kClients = 10;
  const EmbeddingMatrix m = EmbeddingMatrix::Zero(kN, 1);
  std::vector<double> mean_size(kClients, 0.0);
  constexpr int kSeeds = 10;
  for (uint64_t seed = 0; seed < kSeeds; ++seed) {
    auto clients =
        Partition(m, {PartitionStrategy::kDirichlet, kClients, 100.0, seed});
    ASSERT_OK(clients);
    ASSERT_THAT(*clients, SizeIs(kClients));
    for (int i = 0; i < kClients; ++i) {
      mean_size[i] += static_cast<double>((*clients)[i].rows()) / kSeeds;
    }
  }
  for (double s : mean_size) {
    EXPECT_GE(s, 0.8 * kN / kClients);
    EXPECT_LE(s, 1.2 * kN / kClients);
  }
}

TEST(PartitionTest, DirichletSmallAlphaIsSkewedButComplete) {
  Rng rng(3);
  const EmbeddingMatrix m = RandomMatrix(2000, 2, rng);
  auto clients =
      Partition(m, {PartitionStrategy::kDirichlet, 10, 0.1, 4});
  ASSERT_OK(clients);
  const auto sizes = Sizes(*clients);
  EXPECT_GT(*std::max_element(sizes.begin(), sizes.end()), 400);
  EXPECT_EQ(RowMultiset(*clients), RowMultiset(m));
}

TEST(PartitionPropertyTest, PreservesRowsDeterministicUniqueIds) {
  Rng rng(5);
  for (auto strategy : {PartitionStrategy::kRoundRobin,
                        PartitionStrategy::kDirichlet,
                        PartitionStrategy::kByLabel}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::Index n = 1 + 37 * trial;
      const EmbeddingMatrix m = RandomMatrix(n, 3, rng);
      std::vector<int64_t> labels(n);
      for (auto& l : labels) l = static_cast<int64_t>(rng() % 5);
      const PartitionSpec spec{strategy, static_cast<size_t>(1 + trial),
                               0.5, static_cast<uint64_t>(trial)};
      auto a = Partition(m, spec, labels);
      auto b = Partition(m, spec, labels);
      ASSERT_OK(a);
      ASSERT_OK(b);
      EXPECT_EQ(RowMultiset(*a), RowMultiset(m));
      ASSERT_EQ(a->size(), b->size());
      std::set<std::string> ids;
      for (size_t i = 0; i < a->size(); ++i) {
        EXPECT_EQ((*a)[i].id(), (*b)[i].id());
        EXPECT_EQ((*a)[i].embeddings(), (*b)[i].embeddings());
        EXPECT_GE((*a)[i].rows(), 1);
        ids.insert((*a)[i].id());
      }
      EXPECT_EQ(ids.size(), a->size());
      if (strategy == PartitionStrategy::kRoundRobin &&
          n >= static_cast<Eigen::Index>(spec.client_count)) {
        EXPECT_EQ(a->size(), spec.client_count);
      }
    }
  }
}

}  // namespace
}  // namespace fred
