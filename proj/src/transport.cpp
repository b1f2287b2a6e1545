#include "star/transport.hpp"

#include <algorithm>
#include <stdexcept>

namespace star {

std::vector<TpduPlan> fragment(Bytes file_size, Bytes tpdu_max, Bytes frame_payload) {
  if (file_size == 0 || tpdu_max == 0 || frame_payload == 0) throw std::invalid_argument("sizes must be positive");
  if (frame_payload > tpdu_max) throw std::invalid_argument("frame payload larger than TPDU");
  std::vector<TpduPlan> out;
  out.reserve(static_cast<std::size_t>((file_size + tpdu_max - 1) / tpdu_max));
  for (Bytes offset = 0; offset < file_size; offset += tpdu_max) {
    const Bytes size = std::min(tpdu_max, file_size - offset);
    out.push_back(TpduPlan{size, fragment_count(size, frame_payload)});
  }
  return out;
}

ReceiveState::ReceiveState(Tpdu tpdu) : tpdu_(std::move(tpdu)) {
  if (tpdu_.fragments.size() != tpdu_.fragment_count()) tpdu_.fragments = FragmentSet(tpdu_.fragment_count());
}

bool ReceiveState::receive(std::size_t index) {
  if (index >= tpdu_.fragments.size()) {
    ++out_of_range_;
    return false;
  }
  tpdu_.fragments.set(index);
  return true;
}

BatchAck ReceiveState::make_ack(Bytes available_storage) const {
  return BatchAck{tpdu_.id, tpdu_.fragments.complement(), available_storage};
}

HopSession::HopSession(Tpdu tpdu, NodeId sender, NodeId receiver, int max_attempts)
    : tpdu_(std::move(tpdu)),
      sender_(sender),
      receiver_(receiver),
      outstanding_(tpdu_.fragment_count(), true),
      max_attempts_(max_attempts) {}

AckOutcome HopSession::on_batch_ack(const BatchAck& ack) {
  if (closed_) throw std::logic_error("ack on a closed session");
  if (ack.tpdu_id != tpdu_.id) throw std::invalid_argument("ack for a different TPDU");
  if (ack.bitmap.size() != outstanding_.size()) throw std::invalid_argument("ack bitmap length mismatch");
  if (ack.bitmap.none()) {
    outstanding_.fill(false);
    closed_ = true;
    return Complete{};
  }
  ++attempts_;
  if (attempts_ > max_attempts_) {
    closed_ = true;
    return Abort{};
  }
  outstanding_ = ack.bitmap;
  return Retransmit{ack.bitmap.indices()};
}

}  // namespace star
