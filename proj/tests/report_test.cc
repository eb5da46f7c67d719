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

#include "fred/report.h"

#include <string>
#include <vector>

#include "fred/partition.h"
#include "test_util.h"

namespace fred {
namespace {

using ::fred::testing::RandomMatrix;
using ::fred::testing::StatusIs;
using ::fred::testing::TempDir;

std::vector<ClientDataset> Clients(uint64_t seed) {
  Rng rng(seed);
  return *Partition(RandomMatrix(60, 3, rng),
                    {PartitionStrategy::kRoundRobin, 4, 1.0, 0});
}

ProtocolConfig Private(uint64_t seed) {
  ProtocolConfig config;
  config.mode = NoiseMode::kCalibrated;
  config.total_budget = *PrivacyBudget::Create(0.6, 2e-6);
  config.seed = seed;
  return config;
}

TEST(ReportTest, SchemaFields) {
  Rng rng(1);
  auto report = RunFred({"pub", RandomMatrix(40, 3, rng)}, Clients(2),
                        Private(3));
  ASSERT_OK(report);
  const auto j = nlohmann::json::parse(SerializeReport(*report));
  EXPECT_EQ(j.at("version"), "fred-report/1");
  EXPECT_EQ(j.at("command"), "compute");
  EXPECT_EQ(j.at("mode"), "calibrated");
  EXPECT_EQ(j.at("private"), true);
  EXPECT_EQ(j.at("n2"), 60);
  EXPECT_EQ(j.at("dim"), 3);
  EXPECT_EQ(j.at("spent_budget").at("epsilon"), 0.6);
  EXPECT_EQ(j.at("spent_budget").at("delta"), 2e-6);
  EXPECT_EQ(j.at("config").at("seed"), 3);
  EXPECT_FALSE(j.at("config").contains("parallel_clients"));
  const auto& c = j.at("per_candidate").at(0);
  EXPECT_EQ(c.at("name"), "pub");
  for (const char* key : {"raw", "clamped", "mean_term", "trace_term"}) {
    EXPECT_TRUE(c.at(key).is_number()) << key;
  }
  const auto& t = j.at("transcript");
  EXPECT_EQ(t.at("client_count"), 4);
  ASSERT_EQ(t.at("rounds").size(), 3u);
  EXPECT_EQ(t.at("rounds").at(1).at("name"), "mean");
  EXPECT_EQ(t.at("rounds").at(2).at("name"), "cov");
  EXPECT_EQ(t.at("rounds").at(2).at("lane_count"), 6);
  EXPECT_EQ(t.at("rounds").at(2).at("digest").get<std::string>().size(), 16u);
}

TEST(ReportTest, AuditReportIsMarkedNotSpent) {
  ProtocolConfig config;
  config.mode = NoiseMode::kAudit;
  Rng rng(1);
  auto report = RunFred({"pub", RandomMatrix(40, 3, rng)}, Clients(2), config);
  ASSERT_OK(report);
  const auto j = nlohmann::json::parse(SerializeReport(*report));
  EXPECT_TRUE(j.at("spent_budget").is_null());
  EXPECT_EQ(j.at("private"), false);
}

TEST(ReleaseIoTest, RoundTripIsExact) {
  TempDir dir;
  auto release = ReleasePrivateSummary(Clients(5), Private(6));
  ASSERT_OK(release);
  const auto path = dir.path() / "release.json";
  ASSERT_OK(SaveRelease(*release, path));
  auto back = LoadRelease(path);
  ASSERT_OK(back);
  EXPECT_EQ(back->pmean, release->pmean);
  EXPECT_EQ(back->pcov, release->pcov);
  EXPECT_EQ(back->n2, release->n2);
  EXPECT_EQ(*back->spent, *release->spent);
  EXPECT_EQ(back->mode, release->mode);
  EXPECT_EQ(back->config.seed, release->config.seed);
  ASSERT_EQ(back->rounds.size(), release->rounds.size());
  for (size_t i = 0; i < back->rounds.size(); ++i) {
    EXPECT_EQ(back->rounds[i].summary.digest, release->rounds[i].summary.digest);
  }
  // Saving what was loaded reproduces the file byte for byte.
  EXPECT_EQ(ReleaseToJson(*back).dump(2), ReleaseToJson(*release).dump(2));
}

TEST(ReleaseIoTest, AuditCannotPoseAsPrivate) {
  ProtocolConfig config;
  config.mode = NoiseMode::kAudit;
  auto release = ReleasePrivateSummary(Clients(5), config);
  ASSERT_OK(release);
  nlohmann::json doc = nlohmann::json::parse(ReleaseToJson(*release).dump());
  doc["private"] = true;
  EXPECT_THAT(ReleaseFromJson(doc).status(), StatusIs(ErrorKind::kParseError));
  doc["private"] = false;
  doc["spent_budget"] = {{"epsilon", 1.0}, {"delta", 1e-5}};
  EXPECT_THAT(ReleaseFromJson(doc).status(), StatusIs(ErrorKind::kParseError));
  doc["spent_budget"] = nullptr;
  doc["mode"] = "calibrated";
  EXPECT_FALSE(ReleaseFromJson(doc).ok());
}

TEST(ReleaseIoTest, MalformedFiles) {
  TempDir dir;
  ASSERT_OK(WriteTextFile(dir.path() / "bad.json", "{not json"));
  EXPECT_THAT(LoadRelease(dir.path() / "bad.json").status(),
              StatusIs(ErrorKind::kParseError));
  ASSERT_OK(WriteTextFile(dir.path() / "v.json", R"({"version": "x"})"));
  EXPECT_THAT(LoadRelease(dir.path() / "v.json").status(),
              StatusIs(ErrorKind::kParseError));
  EXPECT_THAT(LoadRelease(dir.path() / "missing.json").status(),
              StatusIs(ErrorKind::kIoError));
}

TEST(ConfigJsonTest, RoundTrip) {
  ProtocolConfig config = Private(9);
  config.declared_n2 = 60;
  config.clip_norm = 2.5;
  auto back = ConfigFromJson(nlohmann::json::parse(ConfigToJson(config).dump()));
  ASSERT_OK(back);
  EXPECT_EQ(back->clip_norm, 2.5);
  EXPECT_EQ(back->declared_n2, 60);
  EXPECT_EQ(*back->total_budget, *config.total_budget);
  EXPECT_EQ(back->mode, NoiseMode::kCalibrated);
}

}  // namespace
}  // namespace fred
