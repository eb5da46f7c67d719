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

#include "fred/secure_agg.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "fred/status.h"

namespace fred {

absl::StatusOr<FixedPointCodec> FixedPointCodec::Create(int scale_bits,
                                                        int headroom_bits) {
  if (scale_bits < 0 || headroom_bits < 0 || scale_bits + headroom_bits > 62) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("need 0 <= scale_bits + headroom_bits <= 62, "
                                  "got scale_bits=",
                                  scale_bits, " headroom_bits=",
                                  headroom_bits));
  }
  return FixedPointCodec(scale_bits, headroom_bits);
}

int FixedPointCodec::HeadroomBitsFor(size_t client_count) {
  return static_cast<int>(std::bit_width(client_count));
}

double FixedPointCodec::max_magnitude() const {
  return std::ldexp(1.0, 63 - scale_bits_ - headroom_bits_);
}

double FixedPointCodec::resolution() const {
  return std::ldexp(1.0, -scale_bits_);
}

absl::StatusOr<int64_t> FixedPointCodec::Encode(double x) const {
  if (!std::isfinite(x)) {
    return MakeError(ErrorKind::kNonFinite, "cannot encode NaN or Inf");
  }
  if (!(std::abs(x) < max_magnitude())) {
    return MakeError(ErrorKind::kOverflow,
                     absl::StrCat("|", x, "| exceeds encodable range ",
                                  max_magnitude(), " (scale_bits=",
                                  scale_bits_, ", headroom_bits=",
                                  headroom_bits_, ")"));
  }
  return static_cast<int64_t>(std::llround(std::ldexp(x, scale_bits_)));
}

absl::StatusOr<std::vector<int64_t>> FixedPointCodec::Encode(
    std::span<const double> x) const {
  std::vector<int64_t> out;
  out.reserve(x.size());
  for (double v : x) {
    FRED_ASSIGN_OR_RETURN(int64_t e, Encode(v));
    out.push_back(e);
  }
  return out;
}

double FixedPointCodec::Decode(int64_t v) const {
  return std::ldexp(static_cast<double>(v), -scale_bits_);
}

std::vector<double> FixedPointCodec::Decode(std::span<const int64_t> v) const {
  std::vector<double> out;
  out.reserve(v.size());
  for (int64_t e : v) out.push_back(Decode(e));
  return out;
}

void WrappingAccumulate(std::span<int64_t> acc, std::span<const int64_t> v) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] = WrappingAdd(acc[i], v[i]);
}

absl::StatusOr<std::map<ClientId, std::vector<int64_t>>> GeneratePairwiseMasks(
    std::span<const ClientId> client_ids, size_t lane_count, const Rng& rng) {
  if (client_ids.empty()) {
    return MakeError(ErrorKind::kEmptyList, "no clients to mask");
  }
  std::vector<ClientId> sorted(client_ids.begin(), client_ids.end());
  std::sort(sorted.begin(), sorted.end());
  if (auto dup = std::adjacent_find(sorted.begin(), sorted.end());
      dup != sorted.end()) {
    return MakeError(ErrorKind::kDuplicateClientId,
                     absl::StrCat("client id '", *dup, "' appears twice"));
  }
  std::map<ClientId, std::vector<int64_t>> masks;
  for (const ClientId& id : sorted) {
    masks.emplace(id, std::vector<int64_t>(lane_count, 0));
  }
  const uint64_t n = sorted.size();
  for (uint64_t i = 0; i < n; ++i) {
    std::vector<int64_t>& mask_i = masks[sorted[i]];
    for (uint64_t j = i + 1; j < n; ++j) {
      std::vector<int64_t>& mask_j = masks[sorted[j]];
      Rng pair_rng = rng.Fork(i * n + j);
      for (size_t lane = 0; lane < lane_count; ++lane) {
        const int64_t r = static_cast<int64_t>(pair_rng());
        mask_i[lane] = WrappingAdd(mask_i[lane], r);
        mask_j[lane] = WrappingSub(mask_j[lane], r);
      }
    }
  }
  return masks;
}

absl::StatusOr<MaskedShare> MaskContribution(ClientId client_id,
                                             std::span<const int64_t> encoded,
                                             std::span<const int64_t> mask) {
  if (encoded.size() != mask.size()) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("contribution has ", encoded.size(),
                                  " lanes, mask has ", mask.size()));
  }
  MaskedShare share{std::move(client_id),
                    std::vector<int64_t>(encoded.begin(), encoded.end())};
  WrappingAccumulate(share.lanes, mask);
  return share;
}

absl::StatusOr<std::unique_ptr<AggregationSession>> AggregationSession::Create(
    std::string session_id, std::vector<ClientId> expected_clients,
    size_t lane_count) {
  if (expected_clients.empty()) {
    return MakeError(ErrorKind::kEmptyList, "session needs >= 1 client");
  }
  std::set<ClientId> expected;
  for (ClientId& id : expected_clients) {
    if (!expected.insert(id).second) {
      return MakeError(ErrorKind::kDuplicateClientId,
                       absl::StrCat("client id '", id, "' appears twice"));
    }
  }
  return std::unique_ptr<AggregationSession>(new AggregationSession(
      std::move(session_id), std::move(expected), lane_count));
}

AggregationSession::AggregationSession(std::string session_id,
                                       std::set<ClientId> expected,
                                       size_t lane_count)
    : session_id_(std::move(session_id)),
      expected_(std::move(expected)),
      lane_count_(lane_count) {}

absl::Status AggregationSession::Submit(MaskedShare share) {
  std::lock_guard<std::mutex> lock(mu_);
  if (state_ == State::kFailed) {
    return MakeError(ErrorKind::kSessionClosed,
                     absl::StrCat("session ", session_id_, " has failed"));
  }
  if (!expected_.contains(share.client_id)) {
    return MakeError(ErrorKind::kUnknownClient,
                     absl::StrCat("client '", share.client_id,
                                  "' is not part of session ", session_id_));
  }
  if (received_.contains(share.client_id)) {
    return MakeError(ErrorKind::kDuplicateSubmission,
                     absl::StrCat("client '", share.client_id,
                                  "' already submitted to ", session_id_));
  }
  if (share.lanes.size() != lane_count_) {
    return MakeError(ErrorKind::kDimensionMismatch,
                     absl::StrCat("share has ", share.lanes.size(),
                                  " lanes, session expects ", lane_count_));
  }
  ClientId id = share.client_id;
  received_.emplace(std::move(id), std::move(share));
  if (received_.size() == expected_.size()) state_ = State::kComplete;
  return absl::OkStatus();
}

absl::StatusOr<std::vector<int64_t>> AggregationSession::Finalize() {
  std::lock_guard<std::mutex> lock(mu_);
  if (state_ != State::kComplete) {
    const size_t got = received_.size();
    state_ = State::kFailed;
    return MakeError(ErrorKind::kIncomplete,
                     absl::StrCat("session ", session_id_, " received ", got,
                                  " of ", expected_.size(), " shares"));
  }
  std::vector<int64_t> sum(lane_count_, 0);
  for (const auto& [id, share] : received_) {
    WrappingAccumulate(sum, share.lanes);
  }
  return sum;
}

AggregationSession::State AggregationSession::state() const {
  std::lock_guard<std::mutex> lock(mu_);
  return state_;
}

std::vector<MaskedShare> AggregationSession::transcript() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<MaskedShare> out;
  out.reserve(received_.size());
  for (const auto& [id, share] : received_) out.push_back(share);
  return out;
}

TranscriptSummary AggregationSession::Summary() const {
  std::lock_guard<std::mutex> lock(mu_);
  constexpr uint64_t kFnvPrime = 0x100000001b3ULL;
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= kFnvPrime;
    }
  };
  for (const auto& [id, share] : received_) {
    for (unsigned char ch : id) {
      h ^= ch;
      h *= kFnvPrime;
    }
    for (int64_t lane : share.lanes) mix(static_cast<uint64_t>(lane));
  }
  return TranscriptSummary{session_id_, received_.size(), lane_count_, h};
}

}  // namespace fred
