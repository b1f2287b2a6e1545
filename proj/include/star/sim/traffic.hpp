// File-arrival processes per source node.
#pragma once

#include <optional>
#include <vector>

#include "star/core.hpp"
#include "star/sim/rng.hpp"

namespace star::sim {

enum class TrafficKind { Poisson, Bursty, Constant };

struct TrafficSpec {
  TrafficKind kind = TrafficKind::Poisson;
  std::vector<NodeId> sources;  // empty: every node
  Seconds mean_interarrival = 10.0;
  Seconds interval = 5.0;  // Constant
  Seconds burst = 100.0;   // Bursty
  Seconds quiet = 200.0;
  Bytes file_size = 256 * 1024;
  std::optional<NodeId> dst;  // fixed destination, else uniform over others
  Seconds start = 0.0;
};

class TrafficSource {
 public:
  TrafficSource(const TrafficSpec& spec, NodeId node, std::size_t node_count, Rng rng);

  NodeId node() const { return node_; }
  const TrafficSpec& spec() const { return spec_; }

  /// Next file creation time strictly after the previous one.
  Seconds next_arrival();
  NodeId pick_destination();

  /// Bursty sources only: whether t falls inside a burst.
  bool active(Seconds t) const;

 private:
  Seconds next_burst_start(Seconds t) const;

  TrafficSpec spec_;
  NodeId node_;
  std::size_t node_count_;
  Rng rng_;
  Seconds last_ = 0.0;
  Seconds phase_ = 0.0;
  bool first_ = true;
};

}  // namespace star::sim
