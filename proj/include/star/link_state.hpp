// Topology discovery: Hello/TC generation and processing, two-dimensional
// link costs, liveness tracking and multi-point relay selection.
#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "star/core.hpp"
#include "star/trace.hpp"

namespace star {

enum class SmoothingMode { Window, Ewma };

struct SmoothingConfig {
  SmoothingMode mode = SmoothingMode::Window;
  std::size_t window = 10;
  double ewma_weight = 0.9;  // weight on the previous long-term value
};

/// Long-term EPTT estimator: arithmetic mean over the last W samples, or an
/// exponentially weighted average.
class SmoothingState {
 public:
  explicit SmoothingState(SmoothingConfig config = {});

  void add(Seconds sample);

  bool empty() const { return !has_value_; }
  Seconds current() const { return current_; }
  const std::deque<Seconds>& window() const { return window_; }
  const SmoothingConfig& config() const { return config_; }

 private:
  SmoothingConfig config_;
  std::deque<Seconds> window_;
  Seconds current_ = kSaturated;
  bool has_value_ = false;
};

/// One node's picture of the connectivity graph.
struct TopologyView {
  std::map<LinkKey, LinkRecord> links;
  std::map<LinkKey, SmoothingState> smoothing;
  std::map<NodeId, Bytes> storage;  // advertised available bytes
  Bytes storage_capacity = 0;       // uniform per-node store size

  std::uint64_t generation = 0;        // bumped on every mutation
  std::uint64_t link_set_version = 0;  // bumped when a link is added
  std::uint64_t liveness_version = 0;  // bumped when a link flips alive/dead

  const LinkRecord* find(NodeId from, NodeId to) const;
  std::vector<NodeId> successors(NodeId from, bool alive_only = false) const;
  /// Advertised storage of a node; the full capacity if never advertised.
  Bytes storage_of(NodeId node) const;
};

struct LinkStateConfig {
  NodeId self;
  Bytes frame_bytes = kDefaultFrameBytes;  // EPTT sample size
  Bytes storage_capacity = 2560 * 1024;
  SmoothingConfig smoothing;
  int missed_limit = 3;
};

/// Per-node protocol state machine. Not thread-safe; each node is driven by
/// its own event handler.
class LinkStateNode {
 public:
  explicit LinkStateNode(LinkStateConfig config, Trace* trace = nullptr);

  NodeId self() const { return config_.self; }
  const LinkStateConfig& config() const { return config_; }
  const TopologyView& view() const { return view_; }
  const std::set<NodeId>& mprs() const { return mprs_; }
  std::uint64_t stale_drops() const { return stale_drops_; }

  /// Current one-hop neighbors with the rate of their last frame. Recomputes
  /// the relay set as a side effect.
  HelloMsg make_hello(Bytes available_storage);
  TcMsg make_tc(Bytes available_storage);

  /// Returns false for stale or self-originated messages (view untouched).
  bool process_hello(const HelloMsg& msg, BitsPerSecond rx_rate, Seconds now);
  bool process_tc(const TcMsg& msg, Seconds now);

  /// One missed hello interval for `neighbor`. Returns true when this call
  /// declared the link dead.
  bool on_hello_timeout(NodeId neighbor, Seconds now);

  /// Runs once per hello interval: every neighbor not heard since the last
  /// check takes a timeout. Returns neighbors declared dead by this check.
  std::vector<NodeId> liveness_check(Seconds now);

  /// Storage learned out of band (piggybacked on a batch ack).
  bool record_storage(NodeId node, Bytes available, Seconds now);

  /// True when this node must rebroadcast `msg` received from `from`: the
  /// sender picked us as a relay and we have not relayed this message yet.
  bool should_relay(const TcMsg& msg, NodeId from);

  bool neighbor_alive(NodeId neighbor) const;
  std::vector<NodeId> alive_neighbors() const;

 private:
  struct NeighborInfo {
    std::vector<HelloNeighbor> advertised;
    bool heard = false;
    bool selected_me = false;
  };

  LinkRecord& ensure_link(NodeId from, NodeId to);
  void record_sample(LinkRecord& link, BitsPerSecond rate);
  void revive(LinkRecord& link);
  void saturate(LinkRecord& link);
  void withdraw_unlisted(NodeId to, const std::set<NodeId>& listed);
  void recompute_mprs();
  void trace_link(Seconds now, const char* event, const LinkRecord& link);

  LinkStateConfig config_;
  Trace* trace_ = nullptr;
  TopologyView view_;
  std::map<NodeId, NeighborInfo> neighbors_;
  std::map<NodeId, std::uint64_t> hello_seen_;
  std::map<NodeId, std::uint64_t> tc_seen_;
  std::map<NodeId, std::uint64_t> tc_relayed_;
  std::set<NodeId> mprs_;
  std::uint64_t hello_seq_ = 0;
  std::uint64_t tc_seq_ = 0;
  std::uint64_t stale_drops_ = 0;
};

/// Greedy relay selection: repeatedly take the neighbor covering the most
/// still-uncovered strict two-hop nodes, lowest id on ties.
std::set<NodeId> select_mprs(const std::set<NodeId>& one_hop,
                             const std::map<NodeId, std::set<NodeId>>& two_hop_coverage);

}  // namespace star
