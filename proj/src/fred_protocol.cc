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

#include "fred/fred_protocol.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "fred/status.h"

namespace fred {
namespace {

// Rng::Fork labels. Masks and noise never share a stream.
constexpr uint64_t kCountMaskStream = 1;
constexpr uint64_t kMeanMaskStream = 2;
constexpr uint64_t kCovMaskStream = 3;
constexpr uint64_t kMeanNoiseStream = 4;
constexpr uint64_t kCovNoiseStream = 5;

// Clients in id order. Per-client streams are keyed by position in this
// order, so the caller's ordering of clients never changes the output.
absl::StatusOr<std::vector<const ClientDataset*>> SortedClients(
    std::span<const ClientDataset> clients) {
  if (clients.empty()) {
    return MakeError(ErrorKind::kEmptyList, "federation has no clients");
  }
  std::vector<const ClientDataset*> sorted;
  sorted.reserve(clients.size());
  for (const ClientDataset& c : clients) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const ClientDataset* a, const ClientDataset* b) {
              return a->id() < b->id();
            });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id() == sorted[i - 1]->id()) {
      return MakeError(ErrorKind::kDuplicateClientId,
                       absl::StrCat("client id '", sorted[i]->id(),
                                    "' appears twice"));
    }
  }
  const Eigen::Index d = sorted.front()->dim();
  for (const ClientDataset* c : sorted) {
    if (c->dim() != d) {
      return MakeError(ErrorKind::kDimensionMismatch,
                       absl::StrCat("client '", c->id(), "' has dim ",
                                    c->dim(), ", federation dim is ", d));
    }
  }
  return sorted;
}

std::vector<ClientId> IdsOf(const std::vector<const ClientDataset*>& clients) {
  std::vector<ClientId> ids;
  ids.reserve(clients.size());
  for (const ClientDataset* c : clients) ids.push_back(c->id());
  return ids;
}

// Runs fn(i) for every client index, optionally on worker threads, and
// returns the first failure in index order.
absl::Status ForEachClient(size_t n, bool parallel,
                           const std::function<absl::Status(size_t)>& fn) {
  std::vector<absl::Status> statuses(n);
  if (!parallel || n < 2) {
    for (size_t i = 0; i < n; ++i) statuses[i] = fn(i);
  } else {
    const size_t workers = std::clamp<size_t>(
        std::thread::hardware_concurrency(), 2, std::min<size_t>(n, 16));
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        for (size_t i = w; i < n; i += workers) statuses[i] = fn(i);
      });
    }
  }
  for (absl::Status& s : statuses) {
    if (!s.ok()) return s;
  }
  return absl::OkStatus();
}

absl::StatusOr<FixedPointCodec> CodecFor(const ProtocolConfig& config,
                                         size_t client_count) {
  return FixedPointCodec::Create(
      config.scale_bits, FixedPointCodec::HeadroomBitsFor(client_count));
}

// Opens a session, has every client build and submit its masked share, and
// finalizes. make_share(i, mask) builds client i's share.
absl::StatusOr<std::pair<std::vector<int64_t>, RoundTranscript>> RunSession(
    std::string name, const std::vector<const ClientDataset*>& clients,
    size_t lane_count, const Rng& mask_rng, bool parallel,
    const std::function<absl::StatusOr<MaskedShare>(
        size_t, std::span<const int64_t>)>& make_share) {
  const std::vector<ClientId> ids = IdsOf(clients);
  FRED_ASSIGN_OR_RETURN(auto masks,
                        GeneratePairwiseMasks(ids, lane_count, mask_rng));
  FRED_ASSIGN_OR_RETURN(auto session,
                        AggregationSession::Create(name, ids, lane_count));
  FRED_RETURN_IF_ERROR(ForEachClient(
      clients.size(), parallel, [&](size_t i) -> absl::Status {
        FRED_ASSIGN_OR_RETURN(MaskedShare share,
                              make_share(i, masks.at(ids[i])));
        return session->Submit(std::move(share));
      }));
  FRED_ASSIGN_OR_RETURN(std::vector<int64_t> sum, session->Finalize());
  RoundTranscript transcript{std::move(name), session->Summary(),
                             session->transcript()};
  return std::make_pair(std::move(sum), std::move(transcript));
}

absl::StatusOr<int64_t> RunCountRound(
    const std::vector<const ClientDataset*>& clients,
    const ProtocolConfig& config, std::vector<RoundTranscript>& rounds) {
  const Rng root(config.seed);
  FRED_ASSIGN_OR_RETURN(
      auto result,
      RunSession("count", clients, 1, root.Fork(kCountMaskStream),
                 config.parallel_clients,
                 [&](size_t i, std::span<const int64_t> mask)
                     -> absl::StatusOr<MaskedShare> {
                   const std::array<int64_t, 1> count = {clients[i]->rows()};
                   return MaskContribution(clients[i]->id(), count, mask);
                 }));
  rounds.push_back(std::move(result.second));
  return result.first[0];
}

}  // namespace

absl::Status ValidateConfig(const ProtocolConfig& config) {
  FRED_RETURN_IF_ERROR(ClipNorm::Create(config.clip_norm).status());
  FRED_RETURN_IF_ERROR(FixedPointCodec::Create(config.scale_bits).status());
  if (config.declared_n2.has_value() && *config.declared_n2 <= 0) {
    return MakeError(ErrorKind::kZeroPopulation,
                     absl::StrCat("declared n2 must be >= 1, got ",
                                  *config.declared_n2));
  }
  if (config.mode == NoiseMode::kAudit) return absl::OkStatus();
  if (!config.total_budget.has_value()) {
    return MakeError(ErrorKind::kInvalidBudget,
                     absl::StrCat(NoiseModeName(config.mode),
                                  " mode requires a privacy budget"));
  }
  return SplitBudget(*config.total_budget, config.mean_budget_fraction)
      .status();
}

absl::StatusOr<ClientDataset> ClientDataset::Create(ClientId id,
                                                    EmbeddingMatrix embeddings) {
  if (embeddings.rows() == 0) {
    return MakeError(ErrorKind::kEmptyDataset,
                     absl::StrCat("client '", id, "' has no rows"));
  }
  if (embeddings.cols() == 0) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("client '", id, "' has dim 0"));
  }
  if (!embeddings.allFinite()) {
    return MakeError(ErrorKind::kNonFinite,
                     absl::StrCat("client '", id, "' has NaN or Inf entries"));
  }
  return ClientDataset(std::move(id), std::move(embeddings));
}

absl::StatusOr<NoisePlan> PlanNoise(const ProtocolConfig& config, int64_t n2) {
  FRED_RETURN_IF_ERROR(ValidateConfig(config));
  NoisePlan plan;
  plan.mode = config.mode;
  if (config.mode == NoiseMode::kAudit) return plan;
  FRED_ASSIGN_OR_RETURN(ClipNorm c, ClipNorm::Create(config.clip_norm));
  FRED_ASSIGN_OR_RETURN(
      auto budgets,
      SplitBudget(*config.total_budget, config.mean_budget_fraction));
  FRED_ASSIGN_OR_RETURN(plan.mean, MeanNoiseScale(c, n2, budgets.first));
  FRED_ASSIGN_OR_RETURN(plan.cov, CovNoiseScale(c, n2, budgets.second));
  plan.mean_budget = budgets.first;
  plan.cov_budget = budgets.second;
  return plan;
}

absl::StatusOr<Eigen::VectorXd> MeanContribution(const ClientDataset& client,
                                                 ClipNorm c, NoiseScale tau1,
                                                 NoiseMode mode, int64_t n2,
                                                 Rng& rng) {
  if (n2 <= 0) {
    return MakeError(ErrorKind::kZeroPopulation, "n2 must be >= 1");
  }
  const Eigen::Index d = client.dim();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < client.rows(); ++i) {
    FRED_ASSIGN_OR_RETURN(Eigen::VectorXd row,
                          Clip(client.embeddings().row(i).transpose(), c));
    sum += row;
  }
  switch (mode) {
    case NoiseMode::kAudit:
      break;
    case NoiseMode::kLiteral:
      for (Eigen::Index i = 0; i < client.rows(); ++i) {
        sum += GaussianNoiseVector(d, tau1, rng);
      }
      break;
    case NoiseMode::kCalibrated: {
      // Sum of rows() per-sample draws of std tau1 * sqrt(n2), taken as one
      // draw.
      const double std_dev =
          tau1.tau * std::sqrt(static_cast<double>(n2) *
                               static_cast<double>(client.rows()));
      sum += GaussianNoiseVector(d, NoiseScale{std_dev}, rng);
      break;
    }
  }
  return sum;
}

absl::StatusOr<Eigen::MatrixXd> CovContribution(const ClientDataset& client,
                                                const Eigen::VectorXd& pmean,
                                                ClipNorm c, NoiseScale tau2,
                                                NoiseMode mode, int64_t n2,
                                                size_t client_count, Rng& rng) {
  const Eigen::Index d = client.dim();
  if (pmean.size() != d) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("pmean has dim ", pmean.size(), ", client '",
                                  client.id(), "' has dim ", d));
  }
  if (n2 <= 0 || client_count == 0) {
    return MakeError(ErrorKind::kZeroPopulation,
                     "n2 and client count must be >= 1");
  }
  EmbeddingMatrix centered(client.rows(), d);
  for (Eigen::Index i = 0; i < client.rows(); ++i) {
    FRED_ASSIGN_OR_RETURN(Eigen::VectorXd row,
                          Clip(client.embeddings().row(i).transpose(), c));
    FRED_ASSIGN_OR_RETURN(Eigen::VectorXd recentered, Clip(row - pmean, c));
    centered.row(i) = recentered.transpose();
  }
  Eigen::MatrixXd contribution = Eigen::MatrixXd::Zero(d, d);
  contribution.selfadjointView<Eigen::Lower>().rankUpdate(
      centered.transpose(), 1.0 / static_cast<double>(n2));
  contribution = contribution.selfadjointView<Eigen::Lower>();
  switch (mode) {
    case NoiseMode::kAudit:
      break;
    case NoiseMode::kLiteral:
      contribution += GaussianNoiseSymmetric(d, tau2, rng);
      break;
    case NoiseMode::kCalibrated:
      contribution += GaussianNoiseSymmetric(
          d,
          NoiseScale{tau2.tau / std::sqrt(static_cast<double>(client_count))},
          rng);
      break;
  }
  return contribution;
}

size_t MeanLaneCount(Eigen::Index d) { return static_cast<size_t>(d) + 1; }

size_t CovLaneCount(Eigen::Index d) {
  return static_cast<size_t>(d) * static_cast<size_t>(d + 1) / 2;
}

std::vector<double> PackUpperTriangle(const Eigen::MatrixXd& m) {
  std::vector<double> lanes;
  lanes.reserve(CovLaneCount(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i; j < m.cols(); ++j) lanes.push_back(m(i, j));
  }
  return lanes;
}

Eigen::MatrixXd UnpackUpperTriangle(std::span<const double> lanes,
                                    Eigen::Index d) {
  Eigen::MatrixXd m(d, d);
  size_t k = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      m(i, j) = lanes[k++];
      m(j, i) = m(i, j);
    }
  }
  return m;
}

absl::StatusOr<MaskedShare> ClientMeanContribution(
    const ClientDataset& client, ClipNorm c, NoiseScale tau1, NoiseMode mode,
    int64_t n2, const FixedPointCodec& codec, std::span<const int64_t> mask,
    Rng& rng) {
  FRED_ASSIGN_OR_RETURN(Eigen::VectorXd sum,
                        MeanContribution(client, c, tau1, mode, n2, rng));
  FRED_ASSIGN_OR_RETURN(
      std::vector<int64_t> lanes,
      codec.Encode(std::span<const double>(sum.data(), sum.size())));
  lanes.push_back(client.rows());
  return MaskContribution(client.id(), lanes, mask);
}

absl::StatusOr<MaskedShare> ClientCovContribution(
    const ClientDataset& client, const Eigen::VectorXd& pmean, ClipNorm c,
    NoiseScale tau2, NoiseMode mode, int64_t n2, size_t client_count,
    const FixedPointCodec& codec, std::span<const int64_t> mask, Rng& rng) {
  FRED_ASSIGN_OR_RETURN(
      Eigen::MatrixXd contribution,
      CovContribution(client, pmean, c, tau2, mode, n2, client_count, rng));
  FRED_ASSIGN_OR_RETURN(std::vector<int64_t> lanes,
                        codec.Encode(PackUpperTriangle(contribution)));
  return MaskContribution(client.id(), lanes, mask);
}

absl::StatusOr<MeanRoundResult> RunMeanRound(
    std::span<const ClientDataset> clients, const ProtocolConfig& config) {
  FRED_RETURN_IF_ERROR(ValidateConfig(config));
  FRED_ASSIGN_OR_RETURN(auto sorted, SortedClients(clients));
  FRED_ASSIGN_OR_RETURN(ClipNorm c, ClipNorm::Create(config.clip_norm));
  FRED_ASSIGN_OR_RETURN(FixedPointCodec codec,
                        CodecFor(config, sorted.size()));

  MeanRoundResult result;
  int64_t n2 = 0;
  if (config.declared_n2.has_value()) {
    n2 = *config.declared_n2;
  } else {
    FRED_ASSIGN_OR_RETURN(n2, RunCountRound(sorted, config, result.rounds));
  }
  FRED_ASSIGN_OR_RETURN(NoisePlan plan, PlanNoise(config, n2));

  const Eigen::Index d = sorted.front()->dim();
  const Rng root(config.seed);
  const Rng noise_root = root.Fork(kMeanNoiseStream);
  FRED_ASSIGN_OR_RETURN(
      auto session_result,
      RunSession("mean", sorted, MeanLaneCount(d), root.Fork(kMeanMaskStream),
                 config.parallel_clients,
                 [&](size_t i, std::span<const int64_t> mask) {
                   Rng rng = noise_root.Fork(i);
                   return ClientMeanContribution(*sorted[i], c, plan.mean,
                                                 plan.mode, n2, codec, mask,
                                                 rng);
                 }));
  const std::vector<int64_t>& sum = session_result.first;
  const int64_t aggregated_count = sum[static_cast<size_t>(d)];
  if (aggregated_count != n2) {
    return MakeError(ErrorKind::kCountMismatch,
                     absl::StrCat("clients hold ", aggregated_count,
                                  " samples, noise was calibrated for n2=",
                                  n2));
  }
  result.pmean.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    result.pmean(j) = codec.Decode(sum[static_cast<size_t>(j)]) /
                      static_cast<double>(n2);
  }
  result.n2 = n2;
  result.spent = plan.mean_budget;
  result.rounds.push_back(std::move(session_result.second));
  return result;
}

absl::StatusOr<CovRoundResult> RunCovRound(
    std::span<const ClientDataset> clients, const Eigen::VectorXd& pmean,
    int64_t n2, const ProtocolConfig& config) {
  FRED_RETURN_IF_ERROR(ValidateConfig(config));
  FRED_ASSIGN_OR_RETURN(auto sorted, SortedClients(clients));
  FRED_ASSIGN_OR_RETURN(ClipNorm c, ClipNorm::Create(config.clip_norm));
  FRED_ASSIGN_OR_RETURN(FixedPointCodec codec,
                        CodecFor(config, sorted.size()));
  FRED_ASSIGN_OR_RETURN(NoisePlan plan, PlanNoise(config, n2));
  const Eigen::Index d = sorted.front()->dim();
  if (pmean.size() != d) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("pmean has dim ", pmean.size(),
                                  ", federation dim is ", d));
  }

  const Rng root(config.seed);
  const Rng noise_root = root.Fork(kCovNoiseStream);
  const size_t client_count = sorted.size();
  FRED_ASSIGN_OR_RETURN(
      auto session_result,
      RunSession("cov", sorted, CovLaneCount(d), root.Fork(kCovMaskStream),
                 config.parallel_clients,
                 [&](size_t i, std::span<const int64_t> mask) {
                   Rng rng = noise_root.Fork(i);
                   return ClientCovContribution(*sorted[i], pmean, c,
                                                plan.cov, plan.mode, n2,
                                                client_count, codec, mask,
                                                rng);
                 }));
  const Eigen::MatrixXd aggregate =
      UnpackUpperTriangle(codec.Decode(session_result.first), d);
  CovRoundResult result;
  FRED_ASSIGN_OR_RETURN(result.pcov, NearestPsd(aggregate));
  result.spent = plan.cov_budget;
  result.round = std::move(session_result.second);
  return result;
}

absl::StatusOr<PrivateRelease> ReleasePrivateSummary(
    std::span<const ClientDataset> clients, const ProtocolConfig& config) {
  FRED_ASSIGN_OR_RETURN(MeanRoundResult mean, RunMeanRound(clients, config));
  FRED_ASSIGN_OR_RETURN(CovRoundResult cov,
                        RunCovRound(clients, mean.pmean, mean.n2, config));
  PrivateRelease release;
  release.config = config;
  release.pmean = std::move(mean.pmean);
  release.pcov = std::move(cov.pcov);
  release.n2 = mean.n2;
  release.mode = config.mode;
  release.client_count = clients.size();
  if (config.mode != NoiseMode::kAudit) {
    const std::array parts = {*mean.spent, *cov.spent};
    FRED_ASSIGN_OR_RETURN(release.spent, ComposeSequential(parts));
  }
  for (RoundTranscript& r : mean.rounds) {
    release.rounds.push_back({std::move(r.name), std::move(r.summary)});
  }
  release.rounds.push_back(
      {std::move(cov.round.name), std::move(cov.round.summary)});
  return release;
}

Ranking RankCandidates(std::span<const NamedEmbeddings> candidates,
                       const PrivateRelease& release) {
  Ranking out;
  const GaussianSummary target = release.AsSummary();
  for (size_t i = 0; i < candidates.size(); ++i) {
    const NamedEmbeddings& candidate = candidates[i];
    if (candidate.embeddings.cols() != release.dim()) {
      out.warnings.push_back(absl::StrCat(
          "skipping candidate '", candidate.name, "': dim ",
          candidate.embeddings.cols(), " does not match release dim ",
          release.dim()));
      continue;
    }
    absl::StatusOr<GaussianSummary> summary =
        EmpiricalSummary(candidate.embeddings);
    absl::StatusOr<FrechetValue> distance =
        summary.ok() ? FrechetDistance(*summary, target)
                     : absl::StatusOr<FrechetValue>(summary.status());
    if (!distance.ok()) {
      out.warnings.push_back(absl::StrCat("skipping candidate '",
                                          candidate.name,
                                          "': ", distance.status().message()));
      continue;
    }
    out.ranked.push_back({candidate.name, i, *distance});
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const RankedCandidate& a, const RankedCandidate& b) {
                     return a.distance.raw < b.distance.raw;
                   });
  return out;
}

absl::StatusOr<FredReport> RunFred(const NamedEmbeddings& public_data,
                                   std::span<const ClientDataset> clients,
                                   const ProtocolConfig& config) {
  FRED_RETURN_IF_ERROR(ValidateConfig(config));
  FRED_ASSIGN_OR_RETURN(GaussianSummary public_summary,
                        EmpiricalSummary(public_data.embeddings));
  // Checked before any client round runs so a mismatch spends nothing.
  for (const ClientDataset& client : clients) {
    if (client.dim() != public_summary.dim()) {
      return MakeError(ErrorKind::kDimensionMismatch,
                       absl::StrCat("public data has dim ",
                                    public_summary.dim(), ", client '",
                                    client.id(), "' has dim ", client.dim()));
    }
  }
  FRED_ASSIGN_OR_RETURN(PrivateRelease release,
                        ReleasePrivateSummary(clients, config));
  FRED_ASSIGN_OR_RETURN(FrechetValue distance,
                        FrechetDistance(public_summary, release.AsSummary()));
  FredReport report;
  report.release = std::move(release);
  report.candidates.push_back({public_data.name, 0, distance});
  return report;
}

}  // namespace fred
