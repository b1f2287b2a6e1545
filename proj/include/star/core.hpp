// Shared domain types: node identifiers, link records, storage ledger,
// control messages and transport units.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace star {

using Bytes = std::uint64_t;
using BitsPerSecond = std::uint64_t;
using Seconds = double;

struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}

  auto operator<=>(const NodeId&) const = default;
};

std::string to_string(NodeId id);

/// Cost assigned to a link that is known but currently unusable. Strictly
/// greater than any reachable path cost; any path containing it is
/// saturated as a whole.
inline constexpr Seconds kSaturated = 1.0e6;

inline constexpr Bytes kDefaultFrameBytes = 1024;
inline constexpr Bytes kMaxTpduBytes = 262144;

constexpr bool is_saturated(Seconds cost) { return cost >= kSaturated; }

/// Expected packet transmission time: bits over the best feasible rate.
/// A zero rate yields kSaturated.
Seconds eptt(std::uint64_t size_bits, BitsPerSecond rate);

struct LinkKey {
  NodeId from;
  NodeId to;

  auto operator<=>(const LinkKey&) const = default;
};

/// Per directed link state as seen by one node.
struct LinkRecord {
  NodeId from;
  NodeId to;
  Seconds short_eptt = kSaturated;  // x
  Seconds long_eptt = kSaturated;   // y; finite once a sample exists
  BitsPerSecond last_rate = 0;
  int missed_hellos = 0;
  bool alive = true;
  bool has_long = false;

  bool operator==(const LinkRecord&) const = default;
};

/// Byte budget of the network-layer store on one node.
class StorageLedger {
 public:
  explicit StorageLedger(Bytes capacity = 0) : capacity_(capacity) {}

  Bytes capacity() const { return capacity_; }
  Bytes used() const { return used_; }
  Bytes available() const { return capacity_ - used_; }
  double available_ratio() const {
    return capacity_ == 0 ? 0.0 : static_cast<double>(available()) / static_cast<double>(capacity_);
  }

  /// Snapshot of free space placed into an outgoing control message.
  Bytes advertise() {
    advertised_available_ = available();
    return advertised_available_;
  }
  Bytes advertised_available() const { return advertised_available_; }

  bool try_reserve(Bytes amount);
  void release(Bytes amount);

 private:
  Bytes capacity_ = 0;
  Bytes used_ = 0;
  Bytes advertised_available_ = 0;
};

struct HelloNeighbor {
  NodeId id;
  BitsPerSecond rate = 0;  // rate id -> origin, measured by origin
  bool mpr = false;        // origin selected id as a multi-point relay

  bool operator==(const HelloNeighbor&) const = default;
};

struct HelloMsg {
  NodeId origin;
  std::uint64_t seq = 0;
  std::vector<HelloNeighbor> neighbors;
  Bytes available_storage = 0;

  bool operator==(const HelloMsg&) const = default;
};

/// One relayed link observation: the rate of from -> to as measured by `to`,
/// and the available storage last advertised by `to`.
struct TcEntry {
  NodeId from;
  NodeId to;
  BitsPerSecond rate = 0;
  Bytes to_storage = 0;

  bool operator==(const TcEntry&) const = default;
};

struct TcMsg {
  NodeId origin;
  std::uint64_t seq = 0;
  Bytes available_storage = 0;
  std::vector<TcEntry> two_hop_info;

  bool operator==(const TcMsg&) const = default;
};

struct TpduId {
  NodeId src;
  std::uint32_t counter = 0;

  auto operator<=>(const TpduId&) const = default;
};

std::string to_string(const TpduId& id);

/// Fixed-length bit set; bit k stands for fragment k.
class FragmentSet {
 public:
  FragmentSet() = default;
  explicit FragmentSet(std::size_t size, bool value = false) : bits_(size, value) {}

  std::size_t size() const { return bits_.size(); }
  bool test(std::size_t index) const { return bits_[index]; }
  void set(std::size_t index, bool value = true) { bits_[index] = value; }
  void fill(bool value);

  std::size_t count() const;
  bool all() const { return count() == size(); }
  bool none() const { return count() == 0; }

  FragmentSet complement() const;
  std::vector<std::size_t> indices() const;

  bool operator==(const FragmentSet&) const = default;

 private:
  std::vector<bool> bits_;
};

std::size_t fragment_count(Bytes size, Bytes fragment_size);

struct Tpdu {
  TpduId id;
  NodeId src;
  NodeId dst;
  Bytes size = 0;
  Bytes fragment_size = kDefaultFrameBytes;
  Seconds created_at = 0.0;
  FragmentSet fragments;     // received-fragment flags
  std::uint64_t file_id = 0;

  std::size_t fragment_count() const { return star::fragment_count(size, fragment_size); }
  Bytes fragment_bytes(std::size_t index) const;
  bool complete() const { return fragments.size() == fragment_count() && fragments.all(); }
};

/// Builds a TPDU with every fragment flag cleared.
Tpdu make_tpdu(TpduId id, NodeId src, NodeId dst, Bytes size, Bytes fragment_size, Seconds created_at);

/// Per-TPDU acknowledgment. A set bit asks for retransmission of that
/// fragment; an all-zero bitmap closes the hop. The receiver's free storage
/// rides along, as in every message a node originates.
struct BatchAck {
  TpduId tpdu_id;
  FragmentSet bitmap;
  Bytes available_storage = 0;

  bool complete() const { return bitmap.none(); }
  bool operator==(const BatchAck&) const = default;
};

}  // namespace star
