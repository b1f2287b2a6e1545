#include "star/decision.hpp"

namespace star {

std::string_view to_string(Policy policy) {
  return policy == Policy::Star ? "star" : "baseline-olsr";
}

std::string_view to_string(StoreReason reason) {
  switch (reason) {
    case StoreReason::NoRoute:
      return "no_route";
    case StoreReason::SlowPath:
      return "slow_path";
    case StoreReason::LowDownstreamStorage:
      return "low_downstream_storage";
  }
  return "unknown";
}

Decision Decision::forward_on(PathRecord path) {
  Decision d;
  d.forward = true;
  d.path = std::move(path);
  return d;
}

Decision Decision::store(StoreReason reason) {
  Decision d;
  d.reason = reason;
  return d;
}

Decision decide(std::span<const PathRecord> paths, Bytes payload_size, const DecisionParams& params) {
  if (paths.empty() || is_saturated(paths.front().short_cost)) return Decision::store(StoreReason::NoRoute);
  const auto& best = paths.front();
  if (params.policy == Policy::BaselineOlsr) return Decision::forward_on(best);

  const Seconds x = best.short_cost;
  const Seconds y = best.long_cost;
  if (y < x - params.beta_offset) return Decision::store(StoreReason::SlowPath);
  if (best.bottleneck_ratio() < params.gamma || best.bottleneck_storage < payload_size) {
    return Decision::store(StoreReason::LowDownstreamStorage);
  }
  return Decision::forward_on(best);
}

void StoreQueue::push_back(Tpdu tpdu) {
  bytes_ += tpdu.size;
  ++count_;
  queues_[tpdu.dst].push_back(std::move(tpdu));
}

void StoreQueue::push_front(Tpdu tpdu) {
  bytes_ += tpdu.size;
  ++count_;
  queues_[tpdu.dst].push_front(std::move(tpdu));
}

std::vector<NodeId> StoreQueue::destinations() const {
  std::vector<NodeId> out;
  for (const auto& [dst, q] : queues_) {
    if (!q.empty()) out.push_back(dst);
  }
  return out;
}

const Tpdu* StoreQueue::head(NodeId dst) const {
  const auto it = queues_.find(dst);
  return it == queues_.end() || it->second.empty() ? nullptr : &it->second.front();
}

std::vector<TpduId> StoreQueue::order(NodeId dst) const {
  std::vector<TpduId> out;
  if (const auto it = queues_.find(dst); it != queues_.end()) {
    for (const auto& t : it->second) out.push_back(t.id);
  }
  return out;
}

std::vector<StoreQueue::Evaluation> StoreQueue::reevaluate(std::uint64_t view_generation, const Decider& decider,
                                                           const Admit& admit) {
  last_generation_ = view_generation;
  std::vector<Evaluation> out;
  const auto dsts = destinations();
  if (dsts.empty()) return out;
  const std::size_t start = rotation_++ % dsts.size();
  for (std::size_t i = 0; i < dsts.size(); ++i) {
    auto& q = queues_[dsts[(start + i) % dsts.size()]];
    Evaluation ev{q.front(), decider(q.front())};
    if (ev.decision.forward && (!admit || admit(ev.tpdu, ev.decision))) {
      ev.dequeued = true;
      bytes_ -= q.front().size;
      --count_;
      q.pop_front();
    }
    out.push_back(std::move(ev));
  }
  return out;
}

}  // namespace star
