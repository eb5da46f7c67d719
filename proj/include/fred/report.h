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

// JSON documents produced by the library and CLI.
//
// Report (schema "fred-report/1"):
//   version, command, mode, private, config{...},
//   spent_budget{epsilon, delta} | null, n2, dim, per_candidate[{name, raw, clamped, mean_term, trace_term}],
//   transcript{client_count, rounds[{name, client_count, lane_count,
//   digest}]}, warnings[]
//
// Release (schema "fred-release/1"): the PrivateRelease itself, including
// pmean and pcov, so later invocations can rank more candidates against it.
// Neither document ever contains client embeddings.

#ifndef FRED_REPORT_H_
#define FRED_REPORT_H_

#include <filesystem>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fred/fred_protocol.h"
#include "json.hpp"

namespace fred {

inline constexpr absl::string_view kReportVersion = "fred-report/1";
inline constexpr absl::string_view kReleaseVersion = "fred-release/1";

nlohmann::ordered_json ConfigToJson(const ProtocolConfig& config);
absl::StatusOr<ProtocolConfig> ConfigFromJson(const nlohmann::json& j);
nlohmann::ordered_json ReportToJson(const FredReport& report);
// Pretty-printed JSON followed by a newline.
std::string SerializeReport(const FredReport& report);

nlohmann::ordered_json ReleaseToJson(const PrivateRelease& release);
absl::StatusOr<PrivateRelease> ReleaseFromJson(const nlohmann::json& doc);

absl::Status SaveRelease(const PrivateRelease& release,
                         const std::filesystem::path& path);
absl::StatusOr<PrivateRelease> LoadRelease(const std::filesystem::path& path);

absl::Status WriteTextFile(const std::filesystem::path& path,
                           absl::string_view contents);

}  // namespace fred

#endif  // FRED_REPORT_H_
