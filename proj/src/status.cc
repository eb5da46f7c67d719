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

#include "fred/status.h"

#include <array>
#include <utility>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

namespace fred {
namespace {

struct KindInfo {
  ErrorKind kind;
  absl::string_view name;
  absl::StatusCode code;
};

constexpr std::array kKinds = {
    KindInfo{ErrorKind::kEmptyDataset, "EmptyDataset",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kNonFinite, "NonFinite",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kEigenFailure, "EigenFailure",
             absl::StatusCode::kInternal},
    KindInfo{ErrorKind::kDimensionMismatch, "DimensionMismatch",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kNotPsd, "NotPSD", absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kInvalidBudget, "InvalidBudget",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kZeroPopulation, "ZeroPopulation",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kEmptyList, "EmptyList",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kOverflow, "Overflow", absl::StatusCode::kOutOfRange},
    KindInfo{ErrorKind::kDuplicateClientId, "DuplicateClientId",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kUnknownClient, "UnknownClient",
             absl::StatusCode::kNotFound},
    KindInfo{ErrorKind::kDuplicateSubmission, "DuplicateSubmission",
             absl::StatusCode::kAlreadyExists},
    KindInfo{ErrorKind::kIncomplete, "Incomplete",
             absl::StatusCode::kFailedPrecondition},
    KindInfo{ErrorKind::kSessionClosed, "SessionClosed",
             absl::StatusCode::kFailedPrecondition},
    KindInfo{ErrorKind::kBadMagic, "BadMagic", absl::StatusCode::kDataLoss},
    KindInfo{ErrorKind::kTruncated, "Truncated", absl::StatusCode::kDataLoss},
    KindInfo{ErrorKind::kDimMismatch, "DimMismatch",
             absl::StatusCode::kDataLoss},
    KindInfo{ErrorKind::kUnsupportedDtype, "UnsupportedDtype",
             absl::StatusCode::kUnimplemented},
    KindInfo{ErrorKind::kEmptyInput, "EmptyInput",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kInsufficientRows, "InsufficientRows",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kInvalidArgument, "InvalidArgument",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kIoError, "IoError", absl::StatusCode::kUnavailable},
    KindInfo{ErrorKind::kParseError, "ParseError",
             absl::StatusCode::kInvalidArgument},
    KindInfo{ErrorKind::kCountMismatch, "CountMismatch",
             absl::StatusCode::kFailedPrecondition},
};

const KindInfo& Lookup(ErrorKind kind) {
  for (const KindInfo& info : kKinds) {
    if (info.kind == kind) return info;
  }
  return kKinds.back();
}

}  // namespace

absl::string_view ErrorKindName(ErrorKind kind) { return Lookup(kind).name; }

absl::Status MakeError(ErrorKind kind, absl::string_view message) {
  const KindInfo& info = Lookup(kind);
  return absl::Status(info.code, absl::StrCat(info.name, ": ", message));
}

std::optional<ErrorKind> GetErrorKind(const absl::Status& status) {
  if (status.ok()) return std::nullopt;
  for (const KindInfo& info : kKinds) {
    if (status.code() == info.code &&
        absl::StartsWith(status.message(), absl::StrCat(info.name, ": "))) {
      return info.kind;
    }
  }
  return std::nullopt;
}

}  // namespace fred
