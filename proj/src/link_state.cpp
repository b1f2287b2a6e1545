#include "star/link_state.hpp"

#include <algorithm>

namespace star {

SmoothingState::SmoothingState(SmoothingConfig config) : config_(config) {
  if (config_.window == 0) config_.window = 1;
}

void SmoothingState::add(Seconds sample) {
  if (config_.mode == SmoothingMode::Window) {
    window_.push_back(sample);
    while (window_.size() > config_.window) window_.pop_front();
    // Offsets from the oldest sample keep a run of identical samples exact.
    const Seconds base = window_.front();
    Seconds offset = 0.0;
    for (const auto s : window_) offset += s - base;
    current_ = base + offset / static_cast<double>(window_.size());
  } else {
    current_ = has_value_ ? current_ + (1.0 - config_.ewma_weight) * (sample - current_) : sample;
  }
  has_value_ = true;
}

const LinkRecord* TopologyView::find(NodeId from, NodeId to) const {
  const auto it = links.find(LinkKey{from, to});
  return it == links.end() ? nullptr : &it->second;
}

std::vector<NodeId> TopologyView::successors(NodeId from, bool alive_only) const {
  std::vector<NodeId> out;
  for (auto it = links.lower_bound(LinkKey{from, NodeId(0)}); it != links.end() && it->first.from == from; ++it) {
    if (alive_only && !it->second.alive) continue;
    out.push_back(it->first.to);
  }
  return out;
}

Bytes TopologyView::storage_of(NodeId node) const {
  const auto it = storage.find(node);
  return it == storage.end() ? storage_capacity : it->second;
}

LinkStateNode::LinkStateNode(LinkStateConfig config, Trace* trace) : config_(config), trace_(trace) {
  view_.storage_capacity = config_.storage_capacity;
  view_.storage[config_.self] = config_.storage_capacity;
}

LinkRecord& LinkStateNode::ensure_link(NodeId from, NodeId to) {
  const LinkKey key{from, to};
  auto it = view_.links.find(key);
  if (it == view_.links.end()) {
    LinkRecord rec;
    rec.from = from;
    rec.to = to;
    it = view_.links.emplace(key, rec).first;
    view_.smoothing.emplace(key, SmoothingState(config_.smoothing));
    ++view_.link_set_version;
    view_.storage.try_emplace(from, config_.storage_capacity);
    view_.storage.try_emplace(to, config_.storage_capacity);
  }
  return it->second;
}

void LinkStateNode::record_sample(LinkRecord& link, BitsPerSecond rate) {
  link.last_rate = rate;
  if (rate == 0) {
    link.short_eptt = kSaturated;
    return;
  }
  const Seconds sample = eptt(config_.frame_bytes * 8, rate);
  link.short_eptt = sample;
  auto& smoothing = view_.smoothing.at(LinkKey{link.from, link.to});
  smoothing.add(sample);
  link.long_eptt = smoothing.current();
  link.has_long = true;
}

void LinkStateNode::revive(LinkRecord& link) {
  link.missed_hellos = 0;
  if (!link.alive) {
    link.alive = true;
    ++view_.liveness_version;
  }
}

void LinkStateNode::saturate(LinkRecord& link) {
  link.short_eptt = kSaturated;
  link.missed_hellos = config_.missed_limit;
  if (link.alive) {
    link.alive = false;
    ++view_.liveness_version;
  }
}

void LinkStateNode::withdraw_unlisted(NodeId to, const std::set<NodeId>& listed) {
  // `to` reports every node it currently hears; anything else it used to hear
  // is gone in both directions.
  std::vector<NodeId> gone;
  for (const auto& [key, link] : view_.links) {
    if (key.to == to && key.from != self() && link.alive && !listed.contains(key.from)) gone.push_back(key.from);
  }
  for (const auto from : gone) {
    saturate(view_.links.at(LinkKey{from, to}));
    if (auto it = view_.links.find(LinkKey{to, from}); it != view_.links.end()) saturate(it->second);
  }
}

void LinkStateNode::trace_link(Seconds now, const char* event, const LinkRecord& link) {
  if (trace_ == nullptr || !trace_->enabled()) return;
  trace_->emit({{"time", now},
                {"node", self().value},
                {"event", event},
                {"link", {link.from.value, link.to.value}},
                {"short", link.short_eptt},
                {"long", link.long_eptt},
                {"storage", view_.storage_of(link.from)}});
}

bool LinkStateNode::neighbor_alive(NodeId neighbor) const {
  const auto* link = view_.find(neighbor, self());
  return link != nullptr && link->alive && neighbors_.contains(neighbor);
}

std::vector<NodeId> LinkStateNode::alive_neighbors() const {
  std::vector<NodeId> out;
  for (const auto& [id, info] : neighbors_) {
    if (neighbor_alive(id)) out.push_back(id);
  }
  return out;
}

void LinkStateNode::recompute_mprs() {
  const auto alive = alive_neighbors();
  const std::set<NodeId> one_hop(alive.begin(), alive.end());
  std::map<NodeId, std::set<NodeId>> coverage;
  for (const auto n : alive) {
    auto& covered = coverage[n];
    for (const auto& entry : neighbors_.at(n).advertised) {
      if (entry.id != self() && !one_hop.contains(entry.id)) covered.insert(entry.id);
    }
  }
  mprs_ = select_mprs(one_hop, coverage);
}

HelloMsg LinkStateNode::make_hello(Bytes available_storage) {
  recompute_mprs();
  view_.storage[self()] = available_storage;
  HelloMsg msg;
  msg.origin = self();
  msg.seq = ++hello_seq_;
  msg.available_storage = available_storage;
  for (const auto n : alive_neighbors()) {
    msg.neighbors.push_back(HelloNeighbor{n, view_.find(n, self())->last_rate, mprs_.contains(n)});
  }
  return msg;
}

TcMsg LinkStateNode::make_tc(Bytes available_storage) {
  view_.storage[self()] = available_storage;
  TcMsg msg;
  msg.origin = self();
  msg.seq = ++tc_seq_;
  msg.available_storage = available_storage;
  const auto alive = alive_neighbors();
  for (const auto n : alive) {
    msg.two_hop_info.push_back(TcEntry{n, self(), view_.find(n, self())->last_rate, available_storage});
  }
  for (const auto n : alive) {
    const Bytes n_storage = view_.storage_of(n);
    for (const auto& entry : neighbors_.at(n).advertised) {
      if (entry.id == n) continue;
      msg.two_hop_info.push_back(TcEntry{entry.id, n, entry.rate, n_storage});
    }
  }
  return msg;
}

bool LinkStateNode::process_hello(const HelloMsg& msg, BitsPerSecond rx_rate, Seconds now) {
  if (msg.origin == self()) return false;
  if (auto it = hello_seen_.find(msg.origin); it != hello_seen_.end() && msg.seq <= it->second) {
    ++stale_drops_;
    if (trace_ != nullptr && trace_->enabled()) {
      trace_->emit({{"time", now}, {"node", self().value}, {"event", "stale_hello"}, {"origin", msg.origin.value}});
    }
    return false;
  }
  hello_seen_[msg.origin] = msg.seq;

  auto& direct = ensure_link(msg.origin, self());
  const bool was_dead = !direct.alive;
  record_sample(direct, rx_rate);
  revive(direct);
  view_.storage[msg.origin] = msg.available_storage;

  auto& info = neighbors_[msg.origin];
  info.advertised = msg.neighbors;
  info.heard = true;
  info.selected_me = false;

  std::set<NodeId> listed;
  for (const auto& entry : msg.neighbors) {
    if (entry.id == msg.origin) continue;
    listed.insert(entry.id);
    if (entry.id == self() && entry.mpr) info.selected_me = true;
    auto& link = ensure_link(entry.id, msg.origin);
    record_sample(link, entry.rate);
    if (entry.rate > 0) revive(link);
  }
  withdraw_unlisted(msg.origin, listed);

  ++view_.generation;
  trace_link(now, was_dead ? "link_up" : "hello", direct);
  return true;
}

bool LinkStateNode::process_tc(const TcMsg& msg, Seconds now) {
  if (msg.origin == self()) return false;
  if (auto it = tc_seen_.find(msg.origin); it != tc_seen_.end() && msg.seq <= it->second) {
    ++stale_drops_;
    return false;
  }
  tc_seen_[msg.origin] = msg.seq;
  view_.storage[msg.origin] = msg.available_storage;

  // Our own links and neighbour storage are tracked first-hand; relayed copies are ignored.
  std::map<NodeId, std::set<NodeId>> groups;
  for (const auto& entry : msg.two_hop_info) {
    if (entry.from == self() || entry.to == self() || entry.from == entry.to) continue;
    groups[entry.to].insert(entry.from);
    auto& link = ensure_link(entry.from, entry.to);
    record_sample(link, entry.rate);
    if (entry.rate > 0) revive(link);
    if (entry.to != msg.origin && !neighbor_alive(entry.to)) view_.storage[entry.to] = entry.to_storage;
  }
  for (const auto& [to, listed] : groups) withdraw_unlisted(to, listed);

  ++view_.generation;
  if (trace_ != nullptr && trace_->enabled()) {
    trace_->emit({{"time", now},
                  {"node", self().value},
                  {"event", "tc"},
                  {"origin", msg.origin.value},
                  {"storage", msg.available_storage}});
  }
  return true;
}

bool LinkStateNode::on_hello_timeout(NodeId neighbor, Seconds now) {
  const auto it = view_.links.find(LinkKey{neighbor, self()});
  if (it == view_.links.end()) return false;
  auto& link = it->second;
  if (!link.alive) return false;

  ++link.missed_hellos;
  ++view_.generation;
  if (link.missed_hellos < config_.missed_limit) {
    trace_link(now, "hello_missed", link);
    return false;
  }
  // Long-term cost stays frozen at its current value.
  saturate(link);
  if (auto rev = view_.links.find(LinkKey{self(), neighbor}); rev != view_.links.end()) saturate(rev->second);
  trace_link(now, "link_down", link);
  return true;
}

std::vector<NodeId> LinkStateNode::liveness_check(Seconds now) {
  std::vector<NodeId> dead;
  for (auto& [id, info] : neighbors_) {
    const bool heard = info.heard;
    info.heard = false;
    if (heard) continue;
    if (on_hello_timeout(id, now)) dead.push_back(id);
  }
  return dead;
}

bool LinkStateNode::record_storage(NodeId node, Bytes available, Seconds now) {
  auto& slot = view_.storage[node];
  if (slot == available) return false;
  slot = available;
  ++view_.generation;
  if (trace_ != nullptr && trace_->enabled()) {
    trace_->emit({{"time", now}, {"node", self().value}, {"event", "storage"}, {"of", node.value}, {"storage", available}});
  }
  return true;
}

bool LinkStateNode::should_relay(const TcMsg& msg, NodeId from) {
  if (msg.origin == self()) return false;
  const auto it = neighbors_.find(from);
  if (it == neighbors_.end() || !it->second.selected_me) return false;
  auto& relayed = tc_relayed_[msg.origin];
  if (msg.seq <= relayed) return false;
  relayed = msg.seq;
  return true;
}

std::set<NodeId> select_mprs(const std::set<NodeId>& one_hop,
                             const std::map<NodeId, std::set<NodeId>>& two_hop_coverage) {
  std::set<NodeId> uncovered;
  for (const auto& [n, covered] : two_hop_coverage) {
    if (!one_hop.contains(n)) continue;
    for (const auto m : covered) {
      if (!one_hop.contains(m)) uncovered.insert(m);
    }
  }

  std::set<NodeId> chosen;
  while (!uncovered.empty()) {
    std::size_t best_gain = 0;
    NodeId best{};
    for (const auto& [n, covered] : two_hop_coverage) {
      if (chosen.contains(n) || !one_hop.contains(n)) continue;
      const auto gain = static_cast<std::size_t>(
          std::count_if(covered.begin(), covered.end(), [&](NodeId m) { return uncovered.contains(m); }));
      // Map iteration is ascending, so strict > keeps the lowest id on ties.
      if (gain > best_gain) {
        best_gain = gain;
        best = n;
      }
    }
    if (best_gain == 0) break;
    chosen.insert(best);
    for (const auto m : two_hop_coverage.at(best)) uncovered.erase(m);
  }
  return chosen;
}

}  // namespace star
