#include "star/multipath.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace star {
namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

/// Hop distance from every node to `dst` over the same edge set.
std::map<NodeId, std::size_t> distances_to(const TopologyView& view, NodeId dst, bool alive_only) {
  std::map<NodeId, std::vector<NodeId>> reverse;
  for (const auto& [key, link] : view.links) {
    if (alive_only && !link.alive) continue;
    reverse[key.to].push_back(key.from);
  }
  std::map<NodeId, std::size_t> dist{{dst, 0}};
  std::deque<NodeId> queue{dst};
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    const auto it = reverse.find(v);
    if (it == reverse.end()) continue;
    for (const auto u : it->second) {
      if (dist.try_emplace(u, dist[v] + 1).second) queue.push_back(u);
    }
  }
  return dist;
}

struct TreeNode {
  NodeId node;
  std::size_t parent;
  std::size_t depth;
};

bool on_branch(const std::vector<TreeNode>& tree, std::size_t index, NodeId node) {
  for (std::size_t i = index;; i = tree[i].parent) {
    if (tree[i].node == node) return true;
    if (tree[i].depth == 0) return false;
  }
}

}  // namespace

std::vector<std::vector<NodeId>> search_path_vector(const TopologyView& view, NodeId src, NodeId dst,
                                                    std::size_t q, bool alive_only) {
  if (src == dst) return {};
  const auto dist = distances_to(view, dst, alive_only);
  const auto src_it = dist.find(src);
  if (src_it == dist.end()) return {};
  const std::size_t limit = src_it->second + q;
  auto remaining = [&](NodeId n) {
    const auto it = dist.find(n);
    return it == dist.end() ? kUnreached : it->second;
  };

  std::vector<TreeNode> tree{{src, 0, 0}};
  std::vector<std::size_t> frontier{0};
  std::vector<std::size_t> leaves;
  for (std::size_t d = 0; d < limit && !frontier.empty(); ++d) {
    std::vector<std::size_t> next;
    for (const auto t : frontier) {
      const NodeId k = tree[t].node;
      for (const auto i : view.successors(k, alive_only)) {
        const auto rest = remaining(i);
        if (rest == kUnreached || d + 1 + rest > limit) continue;
        if (on_branch(tree, t, i)) continue;
        tree.push_back(TreeNode{i, t, d + 1});
        if (i == dst) {
          leaves.push_back(tree.size() - 1);
        } else {
          next.push_back(tree.size() - 1);
        }
      }
    }
    frontier = std::move(next);
  }

  std::vector<std::vector<NodeId>> paths;
  paths.reserve(leaves.size());
  for (const auto leaf : leaves) {
    std::vector<NodeId> hops;
    for (std::size_t i = leaf;; i = tree[i].parent) {
      hops.push_back(tree[i].node);
      if (tree[i].depth == 0) break;
    }
    std::reverse(hops.begin(), hops.end());
    paths.push_back(std::move(hops));
  }
  return paths;
}

PathRecord annotate(const TopologyView& view, std::vector<NodeId> hops) {
  PathRecord rec;
  rec.length = hops.empty() ? 0 : hops.size() - 1;
  bool saturated = false;
  bool long_unknown = false;
  for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
    const auto* link = view.find(hops[i], hops[i + 1]);
    if (link == nullptr || is_saturated(link->short_eptt)) {
      saturated = true;
    } else {
      rec.short_cost += link->short_eptt;
    }
    if (link == nullptr || !link->has_long) {
      long_unknown = true;
    } else {
      rec.long_cost += link->long_eptt;
    }
  }
  if (saturated) rec.short_cost = kSaturated;
  if (long_unknown) rec.long_cost = kSaturated;

  rec.bottleneck_capacity = view.storage_capacity;
  rec.bottleneck_storage = view.storage_capacity;
  for (std::size_t i = 1; i + 1 < hops.size(); ++i) {
    rec.bottleneck_storage = std::min(rec.bottleneck_storage, view.storage_of(hops[i]));
  }
  rec.hops = std::move(hops);
  return rec;
}

void rank_paths(std::vector<PathRecord>& paths, std::size_t max_paths) {
  std::stable_sort(paths.begin(), paths.end(), [](const PathRecord& a, const PathRecord& b) {
    if (a.short_cost != b.short_cost) return a.short_cost < b.short_cost;
    if (a.length != b.length) return a.length < b.length;
    return a.hops < b.hops;
  });
  if (max_paths != 0 && paths.size() > max_paths) paths.resize(max_paths);
}

std::vector<PathRecord> find_paths(const TopologyView& view, NodeId src, NodeId dst, const PathQuery& query) {
  std::vector<PathRecord> out;
  for (auto& hops : search_path_vector(view, src, dst, query.q, query.alive_only)) {
    out.push_back(annotate(view, std::move(hops)));
  }
  rank_paths(out, query.max_paths);
  return out;
}

const std::vector<PathRecord>& RouteCache::paths(const TopologyView& view, NodeId src, NodeId dst,
                                                 const PathQuery& query) {
  auto& entry = entries_[{dst, query.alive_only}];
  const bool structure_stale = entry.link_set_version != view.link_set_version ||
                               (query.alive_only && entry.liveness_version != view.liveness_version);
  if (structure_stale) {
    entry.structure = search_path_vector(view, src, dst, query.q, query.alive_only);
    entry.link_set_version = view.link_set_version;
    entry.liveness_version = view.liveness_version;
    entry.generation = ~0ull;
  }
  if (entry.generation != view.generation) {
    entry.ranked.clear();
    entry.ranked.reserve(entry.structure.size());
    for (const auto& hops : entry.structure) entry.ranked.push_back(annotate(view, hops));
    rank_paths(entry.ranked, query.max_paths);
    entry.generation = view.generation;
  }
  return entry.ranked;
}

}  // namespace star
