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

#include "fred/report.h"

#include <fstream>
#include <iterator>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "fred/status.h"

namespace fred {
namespace {

using nlohmann::ordered_json;

ordered_json BudgetToJson(const std::optional<PrivacyBudget>& budget) {
  if (!budget.has_value()) return nullptr;
  return ordered_json{{"epsilon", budget->epsilon()},
                      {"delta", budget->delta()}};
}

std::string DigestHex(uint64_t digest) {
  return absl::StrFormat("%016x", digest);
}

ordered_json RoundsToJson(const PrivateRelease& release) {
  ordered_json rounds = ordered_json::array();
  for (const RoundRecord& r : release.rounds) {
    rounds.push_back({{"name", r.name},
                      {"client_count", r.summary.client_count},
                      {"lane_count", r.summary.lane_count},
                      {"digest", DigestHex(r.summary.digest)}});
  }
  return rounds;
}

ordered_json TranscriptToJson(const PrivateRelease& release) {
  return {{"client_count", release.client_count},
          {"rounds", RoundsToJson(release)}};
}

}  // namespace

ordered_json ConfigToJson(const ProtocolConfig& config) {
  // parallel_clients is deliberately absent: it never changes results and
  // reports must be byte-identical across execution strategies.
  ordered_json j;
  j["clip_norm"] = config.clip_norm;
  j["budget"] = BudgetToJson(config.total_budget);
  j["mean_budget_fraction"] = config.mean_budget_fraction;
  j["mode"] = NoiseModeName(config.mode);
  j["seed"] = config.seed;
  j["scale_bits"] = config.scale_bits;
  j["declared_n2"] = config.declared_n2.has_value()
                         ? ordered_json(*config.declared_n2)
                         : ordered_json(nullptr);
  return j;
}

absl::StatusOr<ProtocolConfig> ConfigFromJson(const nlohmann::json& j) {
  try {
    ProtocolConfig config;
    config.clip_norm = j.at("clip_norm").get<double>();
    if (!j.at("budget").is_null()) {
      FRED_ASSIGN_OR_RETURN(
          config.total_budget,
          PrivacyBudget::Create(j.at("budget").at("epsilon").get<double>(),
                                j.at("budget").at("delta").get<double>()));
    }
    config.mean_budget_fraction = j.at("mean_budget_fraction").get<double>();
    FRED_ASSIGN_OR_RETURN(config.mode,
                          ParseNoiseMode(j.at("mode").get<std::string>()));
    config.seed = j.at("seed").get<uint64_t>();
    config.scale_bits = j.at("scale_bits").get<int>();
    if (!j.at("declared_n2").is_null()) {
      config.declared_n2 = j.at("declared_n2").get<int64_t>();
    }
    FRED_RETURN_IF_ERROR(ValidateConfig(config));
    return config;
  } catch (const std::exception& e) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("malformed config: ", e.what()));
  }
}

ordered_json ReportToJson(const FredReport& report) {
  const PrivateRelease& release = report.release;
  ordered_json j;
  j["version"] = kReportVersion;
  j["command"] = report.command;
  j["mode"] = NoiseModeName(release.mode);
  j["private"] = release.is_private();
  j["config"] = ConfigToJson(release.config);
  j["spent_budget"] = BudgetToJson(release.spent);
  j["n2"] = release.n2;
  j["dim"] = release.dim();
  ordered_json candidates = ordered_json::array();
  for (const RankedCandidate& c : report.candidates) {
    candidates.push_back({{"name", c.name},
                          {"raw", c.distance.raw},
                          {"clamped", c.distance.clamped},
                          {"mean_term", c.distance.mean_term},
                          {"trace_term", c.distance.trace_term}});
  }
  j["per_candidate"] = std::move(candidates);
  j["transcript"] = TranscriptToJson(release);
  j["warnings"] = report.warnings;
  return j;
}

std::string SerializeReport(const FredReport& report) {
  return ReportToJson(report).dump(2) + "\n";
}

ordered_json ReleaseToJson(const PrivateRelease& release) {
  ordered_json j;
  j["version"] = kReleaseVersion;
  j["mode"] = NoiseModeName(release.mode);
  j["private"] = release.is_private();
  j["config"] = ConfigToJson(release.config);
  j["spent_budget"] = BudgetToJson(release.spent);
  j["n2"] = release.n2;
  j["dim"] = release.dim();
  j["pmean"] = std::vector<double>(release.pmean.data(),
                                   release.pmean.data() + release.pmean.size());
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < release.pcov.rows(); ++i) {
    std::vector<double> row(static_cast<size_t>(release.pcov.cols()));
    for (Eigen::Index k = 0; k < release.pcov.cols(); ++k) {
      row[static_cast<size_t>(k)] = release.pcov(i, k);
    }
    rows.push_back(std::move(row));
  }
  j["pcov"] = std::move(rows);
  j["transcript"] = TranscriptToJson(release);
  return j;
}

absl::StatusOr<PrivateRelease> ReleaseFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("version").get<std::string>() != kReleaseVersion) {
      return MakeError(ErrorKind::kParseError,
                       absl::StrCat("unsupported release version ",
                                    doc.at("version").dump()));
    }
    PrivateRelease release;
    FRED_ASSIGN_OR_RETURN(release.mode,
                          ParseNoiseMode(doc.at("mode").get<std::string>()));
    if (doc.at("private").get<bool>() != release.is_private()) {
      return MakeError(ErrorKind::kParseError,
                       "release 'private' flag disagrees with its mode");
    }
    FRED_ASSIGN_OR_RETURN(release.config, ConfigFromJson(doc.at("config")));
    if (release.config.mode != release.mode) {
      return MakeError(ErrorKind::kParseError,
                       "release mode disagrees with its config");
    }
    const nlohmann::json& spent = doc.at("spent_budget");
    if (release.is_private()) {
      if (spent.is_null()) {
        return MakeError(ErrorKind::kParseError,
                         "private release without a spent budget");
      }
      FRED_ASSIGN_OR_RETURN(
          release.spent,
          PrivacyBudget::Create(spent.at("epsilon").get<double>(),
                                spent.at("delta").get<double>()));
    } else if (!spent.is_null()) {
      return MakeError(ErrorKind::kParseError,
                       "audit release cannot carry a spent budget");
    }
    release.n2 = doc.at("n2").get<int64_t>();
    const auto d = doc.at("dim").get<Eigen::Index>();
    const auto pmean = doc.at("pmean").get<std::vector<double>>();
    const auto pcov = doc.at("pcov").get<std::vector<std::vector<double>>>();
    if (d < 1 || static_cast<Eigen::Index>(pmean.size()) != d ||
        static_cast<Eigen::Index>(pcov.size()) != d) {
      return MakeError(ErrorKind::kDimMismatch,
                       "release pmean/pcov do not match its dim");
    }
    release.pmean = Eigen::Map<const Eigen::VectorXd>(pmean.data(), d);
    release.pcov.resize(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      if (static_cast<Eigen::Index>(pcov[i].size()) != d) {
        return MakeError(ErrorKind::kDimMismatch, "pcov is not square");
      }
      for (Eigen::Index k = 0; k < d; ++k) release.pcov(i, k) = pcov[i][k];
    }
    const nlohmann::json& transcript = doc.at("transcript");
    release.client_count = transcript.at("client_count").get<size_t>();
    for (const nlohmann::json& r : transcript.at("rounds")) {
      RoundRecord record;
      record.name = r.at("name").get<std::string>();
      record.summary.session_id = record.name;
      record.summary.client_count = r.at("client_count").get<size_t>();
      record.summary.lane_count = r.at("lane_count").get<size_t>();
      record.summary.digest =
          std::stoull(r.at("digest").get<std::string>(), nullptr, 16);
      release.rounds.push_back(std::move(record));
    }
    return release;
  } catch (const std::exception& e) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat("malformed release: ", e.what()));
  }
}

absl::Status WriteTextFile(const std::filesystem::path& path,
                           absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open ", path.string(),
                                  " for writing"));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

absl::Status SaveRelease(const PrivateRelease& release,
                         const std::filesystem::path& path) {
  return WriteTextFile(path, ReleaseToJson(release).dump(2) + "\n");
}

absl::StatusOr<PrivateRelease> LoadRelease(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open ", path.string()));
  }
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  nlohmann::json doc = nlohmann::json::parse(text, nullptr,
                                             /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return MakeError(ErrorKind::kParseError,
                     absl::StrCat(path.string(), " is not valid JSON"));
  }
  return ReleaseFromJson(doc);
}

}  // namespace fred
