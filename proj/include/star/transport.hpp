// Hop-by-hop reliable transport: file -> TPDU fragmentation, per-hop batch
// transfer with bitmap acknowledgments.
#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "star/core.hpp"

namespace star {

struct TpduPlan {
  Bytes size = 0;
  std::size_t fragments = 0;

  bool operator==(const TpduPlan&) const = default;
};

/// Splits a file into TPDUs of tpdu_max bytes (the last may be shorter), each
/// carried in frame_payload-sized fragments.
std::vector<TpduPlan> fragment(Bytes file_size, Bytes tpdu_max, Bytes frame_payload);

/// Receiver side of one TPDU transfer.
class ReceiveState {
 public:
  explicit ReceiveState(Tpdu tpdu);

  /// Sets the fragment's flag; duplicates are harmless. Out-of-range
  /// indices are dropped and counted.
  bool receive(std::size_t index);

  /// Bitmap of fragments still missing.
  BatchAck make_ack(Bytes available_storage) const;

  bool complete() const { return tpdu_.fragments.all(); }
  const Tpdu& tpdu() const { return tpdu_; }
  std::size_t out_of_range() const { return out_of_range_; }

 private:
  Tpdu tpdu_;
  std::size_t out_of_range_ = 0;
};

struct Retransmit {
  std::vector<std::size_t> fragments;
};
struct Complete {};
struct Abort {};

using AckOutcome = std::variant<Retransmit, Complete, Abort>;

/// Sender side of one TPDU transfer to one neighbor.
class HopSession {
 public:
  HopSession(Tpdu tpdu, NodeId sender, NodeId receiver, int max_attempts = 4);

  const Tpdu& tpdu() const { return tpdu_; }
  NodeId sender() const { return sender_; }
  NodeId receiver() const { return receiver_; }
  const FragmentSet& outstanding() const { return outstanding_; }
  int attempts() const { return attempts_; }
  int max_attempts() const { return max_attempts_; }
  bool closed() const { return closed_; }

  /// Zero bitmap closes the session. A nonzero bitmap asks for exactly the
  /// flagged fragments until more than max_attempts nonzero bitmaps have
  /// been seen, at which point the session aborts.
  AckOutcome on_batch_ack(const BatchAck& ack);

 private:
  Tpdu tpdu_;
  NodeId sender_;
  NodeId receiver_;
  FragmentSet outstanding_;
  int max_attempts_;
  int attempts_ = 0;
  bool closed_ = false;
};

}  // namespace star
