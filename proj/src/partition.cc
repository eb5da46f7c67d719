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

#include "fred/partition.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fred/random.h"
#include "fred/status.h"

namespace fred {

std::string ClientIdFor(size_t index) {
  return absl::StrFormat("client-%05d", index);
}

absl::StatusOr<std::vector<ClientDataset>> Partition(
    const EmbeddingMatrix& embeddings, const PartitionSpec& spec,
    std::span<const int64_t> labels) {
  const Eigen::Index n = embeddings.rows();
  if (n == 0) return MakeError(ErrorKind::kEmptyInput, "nothing to partition");
  if (spec.client_count == 0) {
    return MakeError(ErrorKind::kInvalidArgument, "client_count must be >= 1");
  }
  std::vector<size_t> assignment(static_cast<size_t>(n));
  switch (spec.strategy) {
    case PartitionStrategy::kRoundRobin:
      for (size_t i = 0; i < assignment.size(); ++i) {
        assignment[i] = i % spec.client_count;
      }
      break;
    case PartitionStrategy::kByLabel: {
      if (labels.size() != assignment.size()) {
        return MakeError(ErrorKind::kDimensionMismatch,
                         absl::StrCat(labels.size(), " labels for ", n,
                                      " rows"));
      }
      std::map<int64_t, size_t> rank;
      for (int64_t l : labels) rank.emplace(l, 0);
      size_t k = 0;
      for (auto& [label, r] : rank) r = k++;
      for (size_t i = 0; i < assignment.size(); ++i) {
        assignment[i] = rank[labels[i]] % spec.client_count;
      }
      break;
    }
    case PartitionStrategy::kDirichlet: {
      if (!(spec.alpha > 0) || !std::isfinite(spec.alpha)) {
        return MakeError(ErrorKind::kInvalidArgument,
                         absl::StrCat("dirichlet alpha must be > 0, got ",
                                      spec.alpha));
      }
      Rng rng(spec.seed);
      std::gamma_distribution<double> gamma(spec.alpha, 1.0);
      std::vector<double> weights(spec.client_count);
      for (double& w : weights) w = gamma(rng);
      std::discrete_distribution<size_t> pick(weights.begin(), weights.end());
      for (size_t& a : assignment) a = pick(rng);
      break;
    }
  }

  std::vector<std::vector<Eigen::Index>> rows(spec.client_count);
  for (size_t i = 0; i < assignment.size(); ++i) {
    rows[assignment[i]].push_back(static_cast<Eigen::Index>(i));
  }
  std::vector<ClientDataset> clients;
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].empty()) continue;
    EmbeddingMatrix part = embeddings(rows[k], Eigen::all);
    FRED_ASSIGN_OR_RETURN(ClientDataset client,
                          ClientDataset::Create(ClientIdFor(k), std::move(part)));
    clients.push_back(std::move(client));
  }
  return clients;
}

}  // namespace fred
