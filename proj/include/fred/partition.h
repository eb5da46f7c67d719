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

#ifndef FRED_PARTITION_H_
#define FRED_PARTITION_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "fred/fred_protocol.h"
#include "fred/gaussian_stats.h"

namespace fred {

enum class PartitionStrategy { kRoundRobin, kByLabel, kDirichlet };

struct PartitionSpec {
  PartitionStrategy strategy = PartitionStrategy::kRoundRobin;
  size_t client_count = 1;
  double alpha = 1.0;  // dirichlet concentration
  uint64_t seed = 0;
};

// "client-00000", "client-00001", ...
std::string ClientIdFor(size_t index);

// Splits rows into client datasets. Every row lands in exactly one client;
// rows keep their input order within a client. Clients that end up empty
// (dirichlet draws, or fewer rows than clients) are omitted.
//
//   round_robin: row i goes to client i % client_count.
//   by_label:    labels[i] picks the client; the k-th smallest distinct label
//                maps to client k % client_count.
//   dirichlet:   client proportions p ~ Dir(alpha, ..., alpha), then each row
//                draws its client from p.
absl::StatusOr<std::vector<ClientDataset>> Partition(
    const EmbeddingMatrix& embeddings, const PartitionSpec& spec,
    std::span<const int64_t> labels = {});

}  // namespace fred

#endif  // FRED_PARTITION_H_
