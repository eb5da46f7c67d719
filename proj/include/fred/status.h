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

#ifndef FRED_STATUS_H_
#define FRED_STATUS_H_

#include <optional>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace fred {

// Named failure kinds. Each maps onto a canonical absl::StatusCode and is
// carried as a "<Kind>: " prefix of the status message so callers can
// distinguish e.g. BadMagic from Truncated without string matching on prose.
enum class ErrorKind {
  kEmptyDataset,
  kNonFinite,
  kEigenFailure,
  kDimensionMismatch,
  kNotPsd,
  kInvalidBudget,
  kZeroPopulation,
  kEmptyList,
  kOverflow,
  kDuplicateClientId,
  kUnknownClient,
  kDuplicateSubmission,
  kIncomplete,
  kSessionClosed,
  kBadMagic,
  kTruncated,
  kDimMismatch,
  kUnsupportedDtype,
  kEmptyInput,
  kInsufficientRows,
  kInvalidArgument,
  kIoError,
  kParseError,
  kCountMismatch,
};

absl::string_view ErrorKindName(ErrorKind kind);

absl::Status MakeError(ErrorKind kind, absl::string_view message);

// Returns the kind a status was created with, or nullopt for OK statuses and
// statuses that did not originate from MakeError.
std::optional<ErrorKind> GetErrorKind(const absl::Status& status);

inline bool HasErrorKind(const absl::Status& status, ErrorKind kind) {
  return GetErrorKind(status) == kind;
}

}  // namespace fred

#define FRED_STATUS_CONCAT_INNER_(a, b) a##b
#define FRED_STATUS_CONCAT_(a, b) FRED_STATUS_CONCAT_INNER_(a, b)

#define FRED_RETURN_IF_ERROR(expr)                  \
  do {                                              \
    const ::absl::Status _fred_status = (expr);     \
    if (!_fred_status.ok()) return _fred_status;    \
  } while (0)

#define FRED_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                \
  if (!tmp.ok()) return std::move(tmp).status();    \
  lhs = std::move(tmp).value()

#define FRED_ASSIGN_OR_RETURN(lhs, expr)                                      \
  FRED_ASSIGN_OR_RETURN_IMPL_(FRED_STATUS_CONCAT_(_fred_statusor_, __LINE__), \
                              lhs, expr)

#endif  // FRED_STATUS_H_
