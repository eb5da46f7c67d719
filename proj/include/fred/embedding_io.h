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

// Embedding files.
//
// Binary layout (all integers little-endian):
//   offset  0  8 bytes  magic "FREDEMB1"
//   offset  8  u32      dim (>= 1)
//   offset 12  u64      count (rows, may be 0)
//   offset 20  u32      dtype: element width in bytes, 4 (f32) or 8 (f64)
//   offset 24           count * dim elements, row-major, IEEE-754 LE
// The file must end exactly at the end of the payload.
//
// CSV import: first line "dim=<d>", then one row per line of d
// comma-separated decimals. Blank lines are ignored.

#ifndef FRED_EMBEDDING_IO_H_
#define FRED_EMBEDDING_IO_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include "absl/strings/string_view.h"

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fred/gaussian_stats.h"

namespace fred {

inline constexpr absl::string_view kEmbeddingMagic = "FREDEMB1";
inline constexpr size_t kEmbeddingHeaderSize = 24;

enum class Dtype : uint32_t { kF32 = 4, kF64 = 8 };

absl::StatusOr<std::string> SerializeEmbeddings(const EmbeddingMatrix& m,
                                                Dtype dtype = Dtype::kF64);
absl::StatusOr<EmbeddingMatrix> ParseEmbeddings(absl::string_view bytes);

absl::Status WriteEmbeddings(const EmbeddingMatrix& m,
                             const std::filesystem::path& path,
                             Dtype dtype = Dtype::kF64);
absl::StatusOr<EmbeddingMatrix> ReadEmbeddings(
    const std::filesystem::path& path);

absl::StatusOr<EmbeddingMatrix> ParseCsvEmbeddings(absl::string_view text);
absl::StatusOr<EmbeddingMatrix> ReadCsvEmbeddings(
    const std::filesystem::path& path);

}  // namespace fred

#endif  // FRED_EMBEDDING_IO_H_
