// Store-or-forward policy and the per-node store queue it drives.
#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "star/core.hpp"
#include "star/multipath.hpp"

namespace star {

enum class Policy { Star, BaselineOlsr };

std::string_view to_string(Policy policy);

struct DecisionParams {
  Seconds beta_offset = 0.0;  // offset of the line y = x - beta
  double gamma = 0.5;         // minimum available/total ratio downstream
  Policy policy = Policy::Star;
};

enum class StoreReason { NoRoute, SlowPath, LowDownstreamStorage };

std::string_view to_string(StoreReason reason);

struct Decision {
  bool forward = false;
  std::optional<PathRecord> path;  // set iff forward
  StoreReason reason = StoreReason::NoRoute;

  static Decision forward_on(PathRecord path);
  static Decision store(StoreReason reason);
};

/// Expects `paths` ranked as find_paths returns them; only the best one is
/// ever considered.
Decision decide(std::span<const PathRecord> paths, Bytes payload_size, const DecisionParams& params);

/// Per-destination FIFO queues of TPDUs held in custody.
class StoreQueue {
 public:
  struct Evaluation {
    Tpdu tpdu;
    Decision decision;
    bool dequeued = false;
  };

  using Decider = std::function<Decision(const Tpdu&)>;
  /// Last say before a FORWARD head leaves the queue (e.g. the next hop is
  /// already busy with another transfer).
  using Admit = std::function<bool(const Tpdu&, const Decision&)>;

  void push_back(Tpdu tpdu);
  /// Returns a TPDU to the head of its destination queue.
  void push_front(Tpdu tpdu);

  bool empty() const { return count_ == 0; }
  std::size_t size() const { return count_; }
  Bytes bytes() const { return bytes_; }
  std::vector<NodeId> destinations() const;
  const Tpdu* head(NodeId dst) const;
  std::vector<TpduId> order(NodeId dst) const;

  /// Re-runs the decision for the head of every destination queue. Heads with
  /// a FORWARD verdict that `admit` accepts are removed; at most one TPDU per
  /// destination leaves per call. Destinations are visited round-robin.
  std::vector<Evaluation> reevaluate(std::uint64_t view_generation, const Decider& decider, const Admit& admit = {});

  std::uint64_t last_generation() const { return last_generation_; }

 private:
  std::map<NodeId, std::deque<Tpdu>> queues_;
  std::size_t count_ = 0;
  Bytes bytes_ = 0;
  std::size_t rotation_ = 0;
  std::uint64_t last_generation_ = 0;
};

}  // namespace star
