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

#include "fred/embedding_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "fred/status.h"

namespace fred {
namespace {

static_assert(std::endian::native == std::endian::little,
              "embedding I/O assumes a little-endian host");

template <typename T>
void AppendLe(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

template <typename T>
T LoadLe(const char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  return value;
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open ", path.string()));
  }
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("read failed: ", path.string()));
  }
  return bytes;
}

}  // namespace

absl::StatusOr<std::string> SerializeEmbeddings(const EmbeddingMatrix& m,
                                                Dtype dtype) {
  if (m.cols() < 1 ||
      m.cols() > static_cast<Eigen::Index>(
                     std::numeric_limits<uint32_t>::max())) {
    return MakeError(ErrorKind::kDimMismatch,
                     absl::StrCat("cannot store dim ", m.cols()));
  }
  if (dtype != Dtype::kF32 && dtype != Dtype::kF64) {
    return MakeError(ErrorKind::kUnsupportedDtype, "dtype must be f32 or f64");
  }
  const size_t width = static_cast<size_t>(dtype);
  std::string out;
  out.reserve(kEmbeddingHeaderSize +
              static_cast<size_t>(m.size()) * width);
  out.append(kEmbeddingMagic.data(), kEmbeddingMagic.size());
  AppendLe<uint32_t>(out, static_cast<uint32_t>(m.cols()));
  AppendLe<uint64_t>(out, static_cast<uint64_t>(m.rows()));
  AppendLe<uint32_t>(out, static_cast<uint32_t>(dtype));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (dtype == Dtype::kF64) {
        AppendLe<double>(out, m(i, j));
      } else {
        AppendLe<float>(out, static_cast<float>(m(i, j)));
      }
    }
  }
  return out;
}

absl::StatusOr<EmbeddingMatrix> ParseEmbeddings(absl::string_view bytes) {
  if (bytes.size() < kEmbeddingMagic.size() ||
      bytes.substr(0, kEmbeddingMagic.size()) != kEmbeddingMagic) {
    return MakeError(ErrorKind::kBadMagic, "missing FREDEMB1 magic");
  }
  if (bytes.size() < kEmbeddingHeaderSize) {
    return MakeError(ErrorKind::kTruncated,
                     absl::StrCat("header needs ", kEmbeddingHeaderSize,
                                  " bytes, file has ", bytes.size()));
  }
  const uint32_t dim = LoadLe<uint32_t>(bytes.data() + 8);
  const uint64_t count = LoadLe<uint64_t>(bytes.data() + 12);
  const uint32_t dtype = LoadLe<uint32_t>(bytes.data() + 20);
  if (dim == 0) {
    return MakeError(ErrorKind::kDimMismatch, "header dim is 0");
  }
  if (dtype != static_cast<uint32_t>(Dtype::kF32) &&
      dtype != static_cast<uint32_t>(Dtype::kF64)) {
    return MakeError(ErrorKind::kUnsupportedDtype,
                     absl::StrCat("dtype flag ", dtype));
  }
  const uint64_t available = bytes.size() - kEmbeddingHeaderSize;
  // count * dim * width without overflow.
  const uint64_t row_bytes = static_cast<uint64_t>(dim) * dtype;
  if (count > available / row_bytes) {
    return MakeError(ErrorKind::kTruncated,
                     absl::StrCat("header declares ", count, " rows of ", dim,
                                  " but payload has ", available, " bytes"));
  }
  if (count * row_bytes != available) {
    return MakeError(ErrorKind::kDimMismatch,
                     absl::StrCat(available - count * row_bytes,
                                  " trailing bytes after payload"));
  }
  EmbeddingMatrix m(static_cast<Eigen::Index>(count),
                    static_cast<Eigen::Index>(dim));
  const char* p = bytes.data() + kEmbeddingHeaderSize;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (dtype == static_cast<uint32_t>(Dtype::kF64)) {
        m(i, j) = LoadLe<double>(p);
      } else {
        m(i, j) = LoadLe<float>(p);
      }
      p += dtype;
    }
  }
  return m;
}

absl::Status WriteEmbeddings(const EmbeddingMatrix& m,
                             const std::filesystem::path& path, Dtype dtype) {
  FRED_ASSIGN_OR_RETURN(std::string bytes, SerializeEmbeddings(m, dtype));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("cannot open ", path.string(),
                                  " for writing"));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    return MakeError(ErrorKind::kIoError,
                     absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

absl::StatusOr<EmbeddingMatrix> ReadEmbeddings(
    const std::filesystem::path& path) {
  FRED_ASSIGN_OR_RETURN(std::string bytes, ReadFile(path));
  absl::StatusOr<EmbeddingMatrix> m = ParseEmbeddings(bytes);
  if (!m.ok()) {
    return absl::Status(m.status().code(),
                        absl::StrCat(m.status().message(), " (",
                                     path.string(), ")"));
  }
  return m;
}

absl::StatusOr<EmbeddingMatrix> ParseCsvEmbeddings(absl::string_view text) {
  std::vector<absl::string_view> lines = absl::StrSplit(text, '\n');
  size_t next = 0;
  auto skip_blank = [&] {
    while (next < lines.size() &&
           absl::StripAsciiWhitespace(lines[next]).empty()) {
      ++next;
    }
  };
  skip_blank();
  if (next == lines.size()) {
    return MakeError(ErrorKind::kParseError, "CSV is empty");
  }
  absl::string_view header = absl::StripAsciiWhitespace(lines[next++]);
  int64_t dim = 0;
  if (!absl::ConsumePrefix(&header, "dim=") || !absl::SimpleAtoi(header, &dim) ||
      dim < 1) {
    return MakeError(ErrorKind::kParseError,
                     "CSV header must be dim=<d> with d >= 1");
  }
  std::vector<double> values;
  int64_t rows = 0;
  for (; next < lines.size(); ++next) {
    absl::string_view line = absl::StripAsciiWhitespace(lines[next]);
    if (line.empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (static_cast<int64_t>(fields.size()) != dim) {
      return MakeError(ErrorKind::kDimMismatch,
                       absl::StrCat("CSV line ", next + 1, " has ",
                                    fields.size(), " fields, expected ", dim));
    }
    for (absl::string_view f : fields) {
      double v;
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(f), &v)) {
        return MakeError(ErrorKind::kParseError,
                         absl::StrCat("CSV line ", next + 1, ": '", f,
                                      "' is not a number"));
      }
      values.push_back(v);
    }
    ++rows;
  }
  EmbeddingMatrix m(rows, dim);
  for (int64_t i = 0; i < rows; ++i) {
    for (int64_t j = 0; j < dim; ++j) m(i, j) = values[i * dim + j];
  }
  return m;
}

absl::StatusOr<EmbeddingMatrix> ReadCsvEmbeddings(
    const std::filesystem::path& path) {
  FRED_ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseCsvEmbeddings(text);
}

}  // namespace fred
