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

#include "fred/bench.h"

#include <algorithm>
#include <set>
#include <span>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fred/fred_protocol.h"
#include "fred/partition.h"
#include "fred/random.h"
#include "fred/report.h"
#include "fred/status.h"
#include "fred/synth.h"

namespace fred {
namespace {

constexpr uint64_t kTargetStream = 1;
constexpr uint64_t kMixtureStream = 2;
constexpr uint64_t kTrialStreamBase = 100;

absl::Status ValidateBench(const MixtureBenchConfig& config) {
  if (config.mix_steps.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "no mix steps given");
  }
  for (double y : config.mix_steps) {
    if (!(y >= 0 && y <= 100)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("mix step ", y, " is outside [0, 100]"));
    }
  }
  if (config.trials < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "trials must be >= 1");
  }
  if (config.dim < 1 || config.samples < 1 || config.client_count < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "dim, samples and client count must be >= 1");
  }
  if (config.private_mode == NoiseMode::kAudit) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "private trials need literal or calibrated mode");
  }
  if (!config.total_budget.has_value()) {
    return MakeError(ErrorKind::kInvalidBudget,
                     "private trials need a privacy budget");
  }
  return absl::OkStatus();
}

std::vector<double> RawDistances(const Ranking& ranking, size_t count) {
  std::vector<double> out(count);
  for (const RankedCandidate& c : ranking.ranked) {
    out[c.input_index] = c.distance.raw;
  }
  return out;
}

}  // namespace

double Median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

bool MixtureBenchResult::AuditStrictlyDecreasing() const {
  return std::all_of(pairs.begin(), pairs.end(),
                     [](const AdjacentPair& p) { return p.audit_decreasing; });
}

int MixtureBenchResult::MedianDecreasingPairs() const {
  return static_cast<int>(
      std::count_if(pairs.begin(), pairs.end(),
                    [](const AdjacentPair& p) { return p.median_decreasing; }));
}

absl::StatusOr<MixtureBenchResult> RunMixtureBench(
    const MixtureBenchConfig& config) {
  FRED_RETURN_IF_ERROR(ValidateBench(config));
  const std::set<double> steps(config.mix_steps.begin(),
                               config.mix_steps.end());
  const Rng root(config.seed);
  const Eigen::Index d = config.dim;

  FRED_ASSIGN_OR_RETURN(
      EmbeddingMatrix target,
      SynthGaussian(Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d),
                    config.samples, root.Fork(kTargetStream).seed()));
  FRED_ASSIGN_OR_RETURN(
      std::vector<ClientDataset> clients,
      Partition(target, {PartitionStrategy::kRoundRobin, config.client_count,
                         1.0, config.seed}));

  GaussianSource source_b{Eigen::VectorXd::Zero(d),
                          Eigen::MatrixXd::Identity(d, d)};
  source_b.mean(0) = config.separation;
  // Every mixture uses the same stream, so the rows drawn from each source
  // are nested prefixes across Y.
  const uint64_t mixture_seed = root.Fork(kMixtureStream).seed();
  std::vector<NamedEmbeddings> candidates;
  for (double y : steps) {
    MixtureSpec spec{target, source_b, y, config.samples, mixture_seed};
    FRED_ASSIGN_OR_RETURN(EmbeddingMatrix mix, SynthMixture(spec));
    candidates.push_back({absl::StrCat("mix-", y), std::move(mix)});
  }

  ProtocolConfig protocol;
  protocol.clip_norm = config.clip_norm;
  protocol.total_budget = config.total_budget;
  protocol.scale_bits = config.scale_bits;
  protocol.declared_n2 = config.samples;

  protocol.mode = NoiseMode::kAudit;
  protocol.seed = config.seed;
  FRED_ASSIGN_OR_RETURN(PrivateRelease audit,
                        ReleasePrivateSummary(clients, protocol));
  const std::vector<double> audit_distances =
      RawDistances(RankCandidates(candidates, audit), candidates.size());

  protocol.mode = config.private_mode;
  std::vector<std::vector<double>> trial_distances;
  for (int t = 0; t < config.trials; ++t) {
    protocol.seed = root.Fork(kTrialStreamBase + t).seed();
    FRED_ASSIGN_OR_RETURN(PrivateRelease release,
                          ReleasePrivateSummary(clients, protocol));
    trial_distances.push_back(
        RawDistances(RankCandidates(candidates, release), candidates.size()));
  }

  MixtureBenchResult result;
  result.config = config;
  size_t i = 0;
  for (double y : steps) {
    MixtureBenchRow row;
    row.percent = y;
    row.audit = audit_distances[i];
    for (const auto& trial : trial_distances) {
      row.private_distances.push_back(trial[i]);
    }
    row.min = *std::min_element(row.private_distances.begin(),
                                row.private_distances.end());
    row.max = *std::max_element(row.private_distances.begin(),
                                row.private_distances.end());
    row.median = Median(row.private_distances);
    result.rows.push_back(std::move(row));
    ++i;
  }
  for (size_t k = 0; k + 1 < result.rows.size(); ++k) {
    const MixtureBenchRow& lo = result.rows[k];
    const MixtureBenchRow& hi = result.rows[k + 1];
    result.pairs.push_back({lo.percent, hi.percent, hi.audit < lo.audit,
                            hi.median < lo.median, hi.max < lo.min});
  }
  return result;
}

std::string PlotDataTsv(const MixtureBenchResult& result) {
  // Trial 0 is the audit release; private trials are numbered from 1.
  std::string out = "Y\ttrial\tdistance\tmode\n";
  const absl::string_view mode = NoiseModeName(result.config.private_mode);
  for (const MixtureBenchRow& row : result.rows) {
    absl::StrAppendFormat(&out, "%g\t0\t%.17g\taudit\n", row.percent,
                          row.audit);
    for (size_t t = 0; t < row.private_distances.size(); ++t) {
      absl::StrAppendFormat(&out, "%g\t%d\t%.17g\t%s\n", row.percent, t + 1,
                            row.private_distances[t], mode);
    }
  }
  return out;
}

nlohmann::ordered_json BenchToJson(const MixtureBenchResult& result) {
  using nlohmann::ordered_json;
  const MixtureBenchConfig& c = result.config;
  ordered_json j;
  j["version"] = kReportVersion;
  j["command"] = "synth-bench";
  j["mode"] = NoiseModeName(c.private_mode);
  j["private"] = true;
  j["config"] = {{"mix_steps", c.mix_steps},
                 {"trials", c.trials},
                 {"budget",
                  {{"epsilon", c.total_budget->epsilon()},
                   {"delta", c.total_budget->delta()}}},
                 {"dim", c.dim},
                 {"separation", c.separation},
                 {"samples", c.samples},
                 {"client_count", c.client_count},
                 {"clip_norm", c.clip_norm},
                 {"seed", c.seed},
                 {"scale_bits", c.scale_bits}};
  // Each trial is an independent query of the target.
  j["spent_budget_per_trial"] = {{"epsilon", c.total_budget->epsilon()},
                       {"delta", c.total_budget->delta()}};
  ordered_json rows = ordered_json::array();
  for (const MixtureBenchRow& r : result.rows) {
    rows.push_back({{"percent", r.percent},
                    {"audit", r.audit},
                    {"private", r.private_distances},
                    {"min", r.min},
                    {"median", r.median},
                    {"max", r.max}});
  }
  j["rows"] = std::move(rows);
  ordered_json pairs = ordered_json::array();
  for (const AdjacentPair& p : result.pairs) {
    pairs.push_back({{"lower_percent", p.lower_percent},
                     {"upper_percent", p.upper_percent},
                     {"audit_decreasing", p.audit_decreasing},
                     {"median_decreasing", p.median_decreasing},
                     {"nonoverlapping", p.nonoverlapping}});
  }
  j["pairs"] = std::move(pairs);
  return j;
}

}  // namespace fred
