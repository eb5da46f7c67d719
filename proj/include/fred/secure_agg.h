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

// Simulated honest-but-curious secure aggregation.
//
// Contributions are fixed-point encoded into 64-bit lanes and masked with
// pairwise vectors that cancel in the modular (wrapping) sum. The session
// only ever holds masked shares, and releases nothing but their exact sum
// once every expected client has submitted. Masks come from a seeded PRNG
// per client pair; this stands in for, and is not, cryptographic key
// agreement.

#ifndef FRED_SECURE_AGG_H_
#define FRED_SECURE_AGG_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fred/random.h"

namespace fred {

using ClientId = std::string;

class FixedPointCodec {
 public:
  static constexpr int kDefaultScaleBits = 24;

  // headroom_bits reserves top bits so that summing up to 2^headroom_bits
  // in-range values cannot leave the int64 range.
  static absl::StatusOr<FixedPointCodec> Create(
      int scale_bits = kDefaultScaleBits, int headroom_bits = 0);

  // Bits needed to sum client_count in-range values.
  static int HeadroomBitsFor(size_t client_count);

  int scale_bits() const { return scale_bits_; }
  int headroom_bits() const { return headroom_bits_; }
  // Encodable values satisfy |x| < max_magnitude().
  double max_magnitude() const;
  double resolution() const;  // 2^-scale_bits

  absl::StatusOr<int64_t> Encode(double x) const;
  absl::StatusOr<std::vector<int64_t>> Encode(std::span<const double> x) const;
  double Decode(int64_t v) const;
  std::vector<double> Decode(std::span<const int64_t> v) const;

 private:
  FixedPointCodec(int scale_bits, int headroom_bits)
      : scale_bits_(scale_bits), headroom_bits_(headroom_bits) {}
  int scale_bits_;
  int headroom_bits_;
};

// Two's-complement wrapping lane arithmetic.
inline int64_t WrappingAdd(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) +
                              static_cast<uint64_t>(b));
}
inline int64_t WrappingSub(int64_t a, int64_t b) {
  return static_cast<int64_t>(static_cast<uint64_t>(a) -
                              static_cast<uint64_t>(b));
}
void WrappingAccumulate(std::span<int64_t> acc, std::span<const int64_t> v);

struct MaskedShare {
  ClientId client_id;
  std::vector<int64_t> lanes;
};

// For every unordered pair (i < j) of client ids in sorted order, draws a
// uniform lane vector r_ij from rng.Fork(pair index), adds it to i's mask and
// subtracts it from j's. The lane-wise wrapping sum of all masks is zero.
absl::StatusOr<std::map<ClientId, std::vector<int64_t>>> GeneratePairwiseMasks(
    std::span<const ClientId> client_ids, size_t lane_count, const Rng& rng);

// encoded + mask, lane-wise with wrapping.
absl::StatusOr<MaskedShare> MaskContribution(ClientId client_id,
                                             std::span<const int64_t> encoded,
                                             std::span<const int64_t> mask);

struct TranscriptSummary {
  std::string session_id;
  size_t client_count = 0;
  size_t lane_count = 0;
  uint64_t digest = 0;  // FNV-1a over the masked shares, sorted by client id
};

class AggregationSession {
 public:
  enum class State { kOpen, kComplete, kFailed };

  static absl::StatusOr<std::unique_ptr<AggregationSession>> Create(
      std::string session_id, std::vector<ClientId> expected_clients,
      size_t lane_count);

  AggregationSession(const AggregationSession&) = delete;
  AggregationSession& operator=(const AggregationSession&) = delete;

  // Thread-safe. Errors: UnknownClient, DuplicateSubmission, SessionClosed,
  // DimensionMismatch (wrong lane count).
  absl::Status Submit(MaskedShare share);

  // Returns the wrapping sum of all shares. Calling this before every
  // expected client has submitted fails the session (Incomplete); nothing is
  // released in that case or afterwards.
  absl::StatusOr<std::vector<int64_t>> Finalize();

  State state() const;
  const std::string& session_id() const { return session_id_; }
  size_t lane_count() const { return lane_count_; }
  size_t expected_client_count() const { return expected_.size(); }

  // Masked shares received so far, sorted by client id. This is everything
  // the server sees.
  std::vector<MaskedShare> transcript() const;
  TranscriptSummary Summary() const;

 private:
  AggregationSession(std::string session_id, std::set<ClientId> expected,
                     size_t lane_count);

  const std::string session_id_;
  const std::set<ClientId> expected_;
  const size_t lane_count_;

  mutable std::mutex mu_;
  std::map<ClientId, MaskedShare> received_;
  State state_ = State::kOpen;
};

}  // namespace fred

#endif  // FRED_SECURE_AGG_H_
