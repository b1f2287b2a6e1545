// Multipath computation: every loop-free path whose hop count is within
// q of the shortest, ranked by summed short-term cost.
#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "star/core.hpp"
#include "star/link_state.hpp"

namespace star {

struct PathRecord {
  std::vector<NodeId> hops;  // source first
  std::size_t length = 0;    // hop count
  Seconds short_cost = 0.0;  // sum of x, or kSaturated
  Seconds long_cost = 0.0;   // sum of y
  Bytes bottleneck_storage = 0;   // min over intermediate routers
  Bytes bottleneck_capacity = 0;

  NodeId next_hop() const { return hops.at(1); }
  double bottleneck_ratio() const {
    return bottleneck_capacity == 0 ? 0.0
                                    : static_cast<double>(bottleneck_storage) / static_cast<double>(bottleneck_capacity);
  }
  bool operator==(const PathRecord&) const = default;
};

struct PathQuery {
  std::size_t q = 1;            // hop slack over the shortest path
  std::size_t max_paths = 32;   // 0 keeps every path
  bool alive_only = false;      // drop dead links from the graph entirely
};

/// Level-by-level tree search from `src`: each tree node is a loop-free
/// partial path, expanded to every neighbor not already on it. Branches that
/// can no longer reach `dst` within shortest + q hops are pruned. Leaves at
/// `dst` are read back to the root to form the path vector.
std::vector<std::vector<NodeId>> search_path_vector(const TopologyView& view, NodeId src, NodeId dst,
                                                    std::size_t q, bool alive_only = false);

/// Sums link costs from the view and finds the storage bottleneck over the
/// intermediate routers (source and destination excluded). With no
/// intermediate router the bottleneck is a full, empty store.
PathRecord annotate(const TopologyView& view, std::vector<NodeId> hops);

/// Ascending short cost, then length, then lexicographic hops; keeps the
/// first max_paths (all when 0).
void rank_paths(std::vector<PathRecord>& paths, std::size_t max_paths);

std::vector<PathRecord> find_paths(const TopologyView& view, NodeId src, NodeId dst, const PathQuery& query = {});

/// Memoizes the path structure per destination while the graph's link set
/// (and, for alive-only queries, liveness) is unchanged. Costs are always
/// re-read from the view, so cached results never drift.
class RouteCache {
 public:
  const std::vector<PathRecord>& paths(const TopologyView& view, NodeId src, NodeId dst, const PathQuery& query);

 private:
  struct Entry {
    std::uint64_t link_set_version = ~0ull;
    std::uint64_t liveness_version = ~0ull;
    std::uint64_t generation = ~0ull;
    std::vector<std::vector<NodeId>> structure;
    std::vector<PathRecord> ranked;
  };
  std::map<std::pair<NodeId, bool>, Entry> entries_;
};

}  // namespace star
