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

// Mixture-monotonicity benchmark.
//
// A private federated target is drawn from source A = N(0, I_d). Candidate
// datasets mix Y% rows of the target pool with (100 - Y)% rows of source
// B = N(separation * e1, I_d). One audit release and `trials` private
// releases of the target are made; every candidate is scored against each of
// them, so the whole sweep costs one private query per trial.

#ifndef FRED_BENCH_H_
#define FRED_BENCH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "fred/dp_mechanisms.h"
#include "fred/secure_agg.h"
#include "json.hpp"

namespace fred {

struct MixtureBenchConfig {
  std::vector<double> mix_steps = {0, 25, 50, 75, 95, 99, 100};
  int trials = 5;
  std::optional<PrivacyBudget> total_budget;
  Eigen::Index dim = 32;
  double separation = 5.0;
  int64_t samples = 5000;  // target size and candidate size
  size_t client_count = 10;
  double clip_norm = 2.0;
  NoiseMode private_mode = NoiseMode::kCalibrated;
  uint64_t seed = 0;
  int scale_bits = FixedPointCodec::kDefaultScaleBits;
};

struct MixtureBenchRow {
  double percent = 0;
  double audit = 0;                       // raw distance, zero-noise release
  std::vector<double> private_distances;  // raw, one per trial
  double min = 0;
  double median = 0;
  double max = 0;
};

struct AdjacentPair {
  double lower_percent = 0;
  double upper_percent = 0;
  bool audit_decreasing = false;   // audit(upper) < audit(lower)
  bool median_decreasing = false;  // median(upper) < median(lower)
  // max over trials at upper < min over trials at lower
  bool nonoverlapping = false;
};

struct MixtureBenchResult {
  MixtureBenchConfig config;
  std::vector<MixtureBenchRow> rows;  // ascending percent
  std::vector<AdjacentPair> pairs;    // rows[i], rows[i + 1]

  bool AuditStrictlyDecreasing() const;
  int MedianDecreasingPairs() const;
};

absl::StatusOr<MixtureBenchResult> RunMixtureBench(
    const MixtureBenchConfig& config);

double Median(std::vector<double> values);

// Tab-separated: Y, trial, distance, mode. One audit line (trial 0) and one
// line per private trial for every Y.
std::string PlotDataTsv(const MixtureBenchResult& result);

nlohmann::ordered_json BenchToJson(const MixtureBenchResult& result);

}  // namespace fred

#endif  // FRED_BENCH_H_
