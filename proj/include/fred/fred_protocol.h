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

// Private Frechet distance between a server-held embedding set and a
// federated one, computed from one DP mean round and one DP covariance round
// over simulated secure aggregation. The resulting PrivateRelease can score
// any number of candidate datasets without touching client data again.

#ifndef FRED_FRED_PROTOCOL_H_
#define FRED_FRED_PROTOCOL_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "fred/dp_mechanisms.h"
#include "fred/gaussian_stats.h"
#include "fred/random.h"
#include "fred/secure_agg.h"

namespace fred {

struct ProtocolConfig {
  double clip_norm = 1.0;
  // Total budget for the whole release. Required unless mode is kAudit.
  std::optional<PrivacyBudget> total_budget;
  // Share of epsilon and delta given to the mean mechanism.
  double mean_budget_fraction = 0.5;
  NoiseMode mode = NoiseMode::kCalibrated;
  uint64_t seed = 0;
  int scale_bits = FixedPointCodec::kDefaultScaleBits;
  // Public sample count used to set noise scales. When absent, a separate
  // count round runs before the mean round.
  std::optional<int64_t> declared_n2;
  // Compute client contributions on worker threads. Never changes results.
  bool parallel_clients = false;
};

absl::Status ValidateConfig(const ProtocolConfig& config);

class ClientDataset {
 public:
  static absl::StatusOr<ClientDataset> Create(ClientId id,
                                              EmbeddingMatrix embeddings);

  const ClientId& id() const { return id_; }
  const EmbeddingMatrix& embeddings() const { return embeddings_; }
  int64_t rows() const { return embeddings_.rows(); }
  Eigen::Index dim() const { return embeddings_.cols(); }

 private:
  ClientDataset(ClientId id, EmbeddingMatrix embeddings)
      : id_(std::move(id)), embeddings_(std::move(embeddings)) {}
  ClientId id_;
  EmbeddingMatrix embeddings_;
};

// Noise scales for one release.
struct NoisePlan {
  NoiseMode mode = NoiseMode::kAudit;
  NoiseScale mean;  // tau1
  NoiseScale cov;   // tau2
  std::optional<PrivacyBudget> mean_budget;
  std::optional<PrivacyBudget> cov_budget;
};

absl::StatusOr<NoisePlan> PlanNoise(const ProtocolConfig& config, int64_t n2);

// Sum over the client's rows of clip(row) plus mean-round noise:
//   literal:    N(0, tau1^2) added to every sample
//   calibrated: N(0, tau1^2 n2) per sample, so the aggregated mean carries
//               noise of std tau1
//   audit:      none
absl::StatusOr<Eigen::VectorXd> MeanContribution(const ClientDataset& client,
                                                 ClipNorm c, NoiseScale tau1,
                                                 NoiseMode mode, int64_t n2,
                                                 Rng& rng);

// (1/n2) sum over rows of outer(clip(clip(row) - pmean)) plus symmetric
// noise on the upper triangle, mirrored:
//   literal:    N(0, tau2^2) per client
//   calibrated: N(0, tau2^2 / client_count) per client, so the aggregate
//               carries noise of std tau2
//   audit:      none
absl::StatusOr<Eigen::MatrixXd> CovContribution(const ClientDataset& client,
                                                const Eigen::VectorXd& pmean,
                                                ClipNorm c, NoiseScale tau2,
                                                NoiseMode mode, int64_t n2,
                                                size_t client_count, Rng& rng);

// Lane layouts. Mean round: d fixed-point lanes followed by one raw integer
// count lane. Covariance round: the upper triangle, row-major.
size_t MeanLaneCount(Eigen::Index d);
size_t CovLaneCount(Eigen::Index d);
std::vector<double> PackUpperTriangle(const Eigen::MatrixXd& m);
Eigen::MatrixXd UnpackUpperTriangle(std::span<const double> lanes,
                                    Eigen::Index d);

absl::StatusOr<MaskedShare> ClientMeanContribution(
    const ClientDataset& client, ClipNorm c, NoiseScale tau1, NoiseMode mode,
    int64_t n2, const FixedPointCodec& codec, std::span<const int64_t> mask,
    Rng& rng);

absl::StatusOr<MaskedShare> ClientCovContribution(
    const ClientDataset& client, const Eigen::VectorXd& pmean, ClipNorm c,
    NoiseScale tau2, NoiseMode mode, int64_t n2, size_t client_count,
    const FixedPointCodec& codec, std::span<const int64_t> mask, Rng& rng);

// What the server saw in one secure-aggregation round.
struct RoundTranscript {
  std::string name;  // "count", "mean" or "cov"
  TranscriptSummary summary;
  std::vector<MaskedShare> shares;
};

struct MeanRoundResult {
  Eigen::VectorXd pmean;
  int64_t n2 = 0;
  std::optional<PrivacyBudget> spent;
  std::vector<RoundTranscript> rounds;  // optional count round, then mean
};

struct CovRoundResult {
  Eigen::MatrixXd pcov;  // symmetric PSD
  std::optional<PrivacyBudget> spent;
  RoundTranscript round;
};

absl::StatusOr<MeanRoundResult> RunMeanRound(
    std::span<const ClientDataset> clients, const ProtocolConfig& config);

absl::StatusOr<CovRoundResult> RunCovRound(
    std::span<const ClientDataset> clients, const Eigen::VectorXd& pmean,
    int64_t n2, const ProtocolConfig& config);

struct RoundRecord {
  std::string name;
  TranscriptSummary summary;
};

struct PrivateRelease {
  ProtocolConfig config;  // the configuration that produced this release
  Eigen::VectorXd pmean;
  Eigen::MatrixXd pcov;
  int64_t n2 = 0;
  // Equal to the configured total for literal/calibrated; empty for audit.
  std::optional<PrivacyBudget> spent;
  NoiseMode mode = NoiseMode::kAudit;
  size_t client_count = 0;
  std::vector<RoundRecord> rounds;

  bool is_private() const { return mode != NoiseMode::kAudit; }
  Eigen::Index dim() const { return pmean.size(); }
  GaussianSummary AsSummary() const { return {pmean, pcov, n2}; }
};

// Runs the mean round then the covariance round. Nothing is returned unless
// both complete.
absl::StatusOr<PrivateRelease> ReleasePrivateSummary(
    std::span<const ClientDataset> clients, const ProtocolConfig& config);

struct NamedEmbeddings {
  std::string name;
  EmbeddingMatrix embeddings;
};

struct RankedCandidate {
  std::string name;
  size_t input_index = 0;
  FrechetValue distance;
};

struct Ranking {
  std::vector<RankedCandidate> ranked;  // ascending raw distance, stable
  std::vector<std::string> warnings;    // one per skipped candidate
};

// Scores candidates against an existing release. Consumes no privacy budget:
// it never sees client data. Candidates that cannot be summarized or whose
// dim differs from the release are skipped with a warning.
Ranking RankCandidates(std::span<const NamedEmbeddings> candidates,
                       const PrivateRelease& release);

struct FredReport {
  std::string command = "compute";  // producing CLI command
  PrivateRelease release;
  std::vector<RankedCandidate> candidates;
  std::vector<std::string> warnings;
};

// Non-private summary of the public set, one private release of the
// clients, and the distance between them.
absl::StatusOr<FredReport> RunFred(const NamedEmbeddings& public_data,
                                   std::span<const ClientDataset> clients,
                                   const ProtocolConfig& config);

}  // namespace fred

#endif  // FRED_FRED_PROTOCOL_H_
