#include "star/sim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>

#include "star/decision.hpp"
#include "star/link_state.hpp"
#include "star/multipath.hpp"
#include "star/sim/event_queue.hpp"
#include "star/sim/link_model.hpp"
#include "star/sim/mobility.hpp"
#include "star/sim/rng.hpp"
#include "star/sim/traffic.hpp"
#include "star/transport.hpp"

namespace star::sim {

BitsPerSecond tier_rate(const std::vector<RateTier>& tiers, double distance) {
  for (const auto& t : tiers) {
    if (distance <= t.distance) return t.rate;
  }
  return tiers.empty() ? 0 : tiers.back().rate;
}

namespace {

constexpr Seconds kHelloLatency = 1e-6;
constexpr Bytes kAckHeaderBytes = 16;
constexpr int kPlacementAttempts = 1000;

bool links_connected(std::size_t n, const std::vector<LinkSpec>& links) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const auto& l : links) {
    adj[l.a.value].push_back(l.b.value);
    adj[l.b.value].push_back(l.a.value);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::uint32_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (const auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == n;
}

}  // namespace

std::vector<LinkSpec> place_nodes(const Scenario& sc, std::uint64_t seed, std::vector<Vec2>* positions) {
  const auto& pl = *sc.placement;
  Rng rng = make_rng(seed, Stream::Placement);
  std::uniform_real_distribution<double> ux(0.0, pl.width);
  std::uniform_real_distribution<double> uy(0.0, pl.height);
  const std::size_t n = sc.node_count();
  std::vector<LinkSpec> links;
  std::vector<Vec2> pos(n);
  for (int attempt = 0; attempt < kPlacementAttempts; ++attempt) {
    for (auto& p : pos) p = {ux(rng), uy(rng)};
    links.clear();
    for (std::uint32_t u = 0; u < n; ++u) {
      for (std::uint32_t v = u + 1; v < n; ++v) {
        const double d = distance(pos[u], pos[v]);
        if (d > pl.range) continue;
        LinkSpec l;
        l.a = NodeId(u);
        l.b = NodeId(v);
        l.model.kind = LinkKind::Static;
        l.model.rate = tier_rate(pl.tiers, d);
        l.model.loss_rate = pl.loss_rate;
        links.push_back(l);
      }
    }
    if (links_connected(n, links)) break;
  }
  if (positions != nullptr) *positions = pos;
  return links;
}

namespace {

enum class Ev : std::uint8_t {
  HelloTimer,
  TcTimer,
  HelloDeliver,
  TcDeliver,
  RoundEnd,
  AckTimeout,
  Service,
  Medium,
  Traffic,
  LinkChange,
  Crossing,
  MobilityStep,
};

struct Payload {
  Payload() = default;
  Payload(Ev type_, std::uint32_t a_ = 0, std::uint32_t b_ = 0, std::uint64_t id_ = 0,
          std::shared_ptr<const HelloMsg> hello_ = {}, std::shared_ptr<const TcMsg> tc_ = {})
      : type(type_), a(a_), b(b_), id(id_), hello(std::move(hello_)), tc(std::move(tc_)) {}

  Ev type = Ev::Service;
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  std::uint64_t id = 0;
  std::shared_ptr<const HelloMsg> hello;
  std::shared_ptr<const TcMsg> tc;
};

struct Node {
  Node(LinkStateConfig cfg, Trace* trace) : ls(cfg, trace), ledger(cfg.storage_capacity) {}

  LinkStateNode ls;
  StorageLedger ledger;
  StoreQueue store;
  RouteCache cache;
  std::deque<Tpdu> backlog;  // own files waiting for store space
  std::uint32_t tpdu_counter = 0;
  std::map<NodeId, std::string> last_verdict;  // trace only
  bool busy = false;
  bool service_pending = false;
};

enum class Phase { Ready, InRound, Waiting, NeedRequest };

struct Session {
  Session(std::uint64_t id_, HopSession hop_, ReceiveState recv_)
      : id(id_), hop(std::move(hop_)), recv(std::move(recv_)) {}

  std::uint64_t id;
  HopSession hop;
  ReceiveState recv;
  Phase phase = Phase::Ready;
  bool ack_delivered = false;
  bool custody_taken = false;
  std::vector<std::size_t> pending;
  Seconds round_time = 0.0;
  Seconds airtime = 0.0;
};

class Engine {
 public:
  Engine(const Scenario& sc, std::uint64_t seed, Trace* trace)
      : sc_(sc),
        p_(sc.params),
        seed_(seed),
        trace_(trace != nullptr && trace->enabled() ? trace : nullptr),
        channel_(make_rng(seed, Stream::Channel)),
        medium_(make_rng(seed, Stream::Medium)) {}

  SimResult run() {
    setup_topology();
    setup_nodes();
    setup_traffic();
    while (!queue_.empty() && queue_.next_time() <= sc_.duration) {
      auto e = queue_.pop();
      now_ = e.time;
      dispatch(e.payload);
    }
    return finish();
  }

 private:
  // ---- setup -------------------------------------------------------------

  void setup_topology() {
    const std::size_t n = sc_.node_count();
    adjacency_.assign(n, {});
    if (sc_.mobility) {
      const auto& m = *sc_.mobility;
      mobility_.emplace(m.grid, n, make_rng(seed_, Stream::Mobility));
      in_range_.assign(n, std::vector<char>(n, 0));
      for (std::size_t u = 0; u < n; ++u) {
        positions_.push_back(mobility_->position(u, 0.0));
        for (std::size_t v = u + 1; v < n; ++v) {
          const bool near = distance(mobility_->position(u, 0.0), mobility_->position(v, 0.0)) <= m.range;
          in_range_[u][v] = in_range_[v][u] = near ? 1 : 0;
          schedule_crossings(u, v);
        }
      }
      schedule_mobility_step();
      return;
    }
    links_ = sc_.placement ? place_nodes(sc_, seed_, &positions_) : sc_.links;
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto& l = links_[i];
      Rng rng = make_rng(seed_, Stream::LinkSchedule, i);
      schedules_.emplace_back(l.model, sc_.duration, rng);
      link_index_[std::minmax(l.a.value, l.b.value)] = i;
      adjacency_[l.a.value].push_back(l.b.value);
      adjacency_[l.b.value].push_back(l.a.value);
      for (const auto t : schedules_.back().change_times()) {
        if (t <= sc_.duration) push(t, EventKind::LinkScheduleChange, {Ev::LinkChange, 0, 0, i});
      }
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());
  }

  void setup_nodes() {
    const std::size_t n = sc_.node_count();
    Rng phase = make_rng(seed_, Stream::Phase);
    std::uniform_real_distribution<double> hello(0.0, p_.hello_interval);
    std::uniform_real_distribution<double> tc(0.0, p_.tc_interval);
    nodes_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      LinkStateConfig cfg;
      cfg.self = NodeId(i);
      cfg.frame_bytes = p_.frame_bytes;
      cfg.storage_capacity = p_.storage_capacity;
      cfg.smoothing = p_.smoothing;
      nodes_.emplace_back(cfg, trace_);
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      push(hello(phase), EventKind::Timer, {Ev::HelloTimer, i});
      push(tc(phase), EventKind::Timer, {Ev::TcTimer, i});
    }
  }

  void setup_traffic() {
    const Seconds stop = traffic_stop();
    for (std::size_t k = 0; k < sc_.traffic.size(); ++k) {
      const auto& spec = sc_.traffic[k];
      std::vector<NodeId> sources = spec.sources;
      if (sources.empty()) {
        for (std::uint32_t i = 0; i < sc_.node_count(); ++i) {
          if (!spec.dst || *spec.dst != NodeId(i)) sources.push_back(NodeId(i));
        }
      }
      for (const auto s : sources) {
        const std::uint64_t index = (static_cast<std::uint64_t>(k) << 32) | s.value;
        sources_.emplace_back(spec, s, sc_.node_count(), make_rng(seed_, Stream::Traffic, index));
        const Seconds t = sources_.back().next_arrival();
        if (t <= stop) push(t, EventKind::TrafficArrival, {Ev::Traffic, 0, 0, sources_.size() - 1});
      }
    }
  }

  Seconds traffic_stop() const { return sc_.traffic_stop.value_or(sc_.duration); }

  // ---- event plumbing ----------------------------------------------------

  void push(Seconds t, EventKind kind, Payload payload) { queue_.push(t, kind, std::move(payload)); }

  void emit(nlohmann::json record) {
    if (trace_ == nullptr) return;
    record["t"] = now_;
    trace_->emit(record);
  }

  void request_service(std::uint32_t u) {
    if (nodes_[u].service_pending) return;
    nodes_[u].service_pending = true;
    push(now_, EventKind::Timer, {Ev::Service, u});
  }

  void request_medium() {
    if (medium_pending_) return;
    medium_pending_ = true;
    push(now_, EventKind::Timer, {Ev::Medium});
  }

  void dispatch(const Payload& e) {
    switch (e.type) {
      case Ev::HelloTimer: on_hello_timer(e.a); break;
      case Ev::TcTimer: on_tc_timer(e.a); break;
      case Ev::HelloDeliver: on_hello_deliver(e); break;
      case Ev::TcDeliver: on_tc_deliver(e); break;
      case Ev::RoundEnd: on_round_end(e.id); break;
      case Ev::AckTimeout: on_ack_timeout(e.id); break;
      case Ev::Service: on_service(e.a); break;
      case Ev::Medium: on_medium(); break;
      case Ev::Traffic: on_traffic(e.id); break;
      case Ev::LinkChange: on_link_change(e.id); break;
      case Ev::Crossing: on_crossing(e.a, e.b); break;
      case Ev::MobilityStep: on_mobility_step(); break;
    }
  }

  // ---- channel -----------------------------------------------------------

  LinkState link_state(std::uint32_t u, std::uint32_t v, Seconds t) const {
    if (mobility_) {
      const auto& m = *sc_.mobility;
      LinkState s;
      s.on = in_range_[u][v] != 0;
      s.rate = tier_rate(m.tiers, distance(mobility_->position(u, t), mobility_->position(v, t)));
      s.loss_rate = m.loss_rate;
      return s;
    }
    const auto it = link_index_.find(std::minmax(u, v));
    if (it == link_index_.end()) return LinkState{false, 1, 0.0};
    return schedules_[it->second].at(t);
  }

  std::vector<std::uint32_t> radio_neighbors(std::uint32_t u) const {
    if (!mobility_) return adjacency_[u];
    std::vector<std::uint32_t> out;
    for (std::uint32_t v = 0; v < sc_.node_count(); ++v) {
      if (v != u && in_range_[u][v]) out.push_back(v);
    }
    return out;
  }

  void on_link_change(std::uint64_t index) {
    const auto& l = links_[index];
    const auto s = schedules_[index].at(now_);
    emit({{"event", "link_state"}, {"a", l.a.value}, {"b", l.b.value}, {"on", s.on}, {"rate", s.rate}});
  }

  // ---- mobility ----------------------------------------------------------

  void schedule_crossings(std::size_t u, std::size_t v) {
    const auto& su = mobility_->segment(u);
    const auto& sv = mobility_->segment(v);
    const Seconds until = std::min({su.end, sv.end, sc_.duration});
    for (const auto t : range_crossings(su, sv, now_, until, sc_.mobility->range)) {
      push(t, EventKind::LinkScheduleChange,
           {Ev::Crossing, static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
    }
  }

  void schedule_mobility_step() {
    const Seconds t = mobility_->next_turn();
    if (t <= sc_.duration) push(t, EventKind::MobilityStep, {Ev::MobilityStep});
  }

  void on_crossing(std::uint32_t u, std::uint32_t v) {
    const bool now_in = in_range_[u][v] == 0;
    in_range_[u][v] = in_range_[v][u] = now_in ? 1 : 0;
    emit({{"event", "range"}, {"a", u}, {"b", v}, {"on", now_in}});
  }

  void on_mobility_step() {
    const auto turned = mobility_->advance(now_);
    const std::set<std::size_t> moved(turned.begin(), turned.end());
    const std::size_t n = sc_.node_count();
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = u + 1; v < n; ++v) {
        if (moved.contains(u) || moved.contains(v)) schedule_crossings(u, v);
      }
    }
    schedule_mobility_step();
  }

  // ---- control plane -----------------------------------------------------

  void on_hello_timer(std::uint32_t u) {
    auto& node = nodes_[u];
    for (const auto dead : node.ls.liveness_check(now_)) on_neighbor_dead(u, dead.value);
    const auto msg = std::make_shared<const HelloMsg>(node.ls.make_hello(node.ledger.advertise()));
    for (const auto v : radio_neighbors(u)) {
      if (link_state(u, v, now_).on) push(now_ + kHelloLatency, EventKind::FrameArrival, {Ev::HelloDeliver, u, v, 0, msg, {}});
    }
    request_service(u);
    push(now_ + p_.hello_interval, EventKind::Timer, {Ev::HelloTimer, u});
  }

  void on_hello_deliver(const Payload& e) {
    const auto s = link_state(e.a, e.b, now_);
    if (!s.on) return;
    if (nodes_[e.b].ls.process_hello(*e.hello, s.rate, now_)) request_service(e.b);
  }

  void on_tc_timer(std::uint32_t u) {
    auto& node = nodes_[u];
    const auto msg = std::make_shared<const TcMsg>(node.ls.make_tc(node.ledger.advertise()));
    broadcast_tc(u, msg);
    push(now_ + p_.tc_interval, EventKind::Timer, {Ev::TcTimer, u});
  }

  void broadcast_tc(std::uint32_t u, const std::shared_ptr<const TcMsg>& msg) {
    for (const auto v : radio_neighbors(u)) {
      if (link_state(u, v, now_).on) {
        push(now_ + p_.control_hop_delay, EventKind::FrameArrival, {Ev::TcDeliver, u, v, 0, {}, msg});
      }
    }
  }

  void on_tc_deliver(const Payload& e) {
    if (!link_state(e.a, e.b, now_).on) return;
    auto& node = nodes_[e.b];
    if (node.ls.process_tc(*e.tc, now_)) request_service(e.b);
    if (node.ls.should_relay(*e.tc, NodeId(e.a))) broadcast_tc(e.b, e.tc);
  }

  void on_neighbor_dead(std::uint32_t u, std::uint32_t dead) {
    std::vector<std::uint64_t> doomed;
    for (const auto& [id, s] : sessions_) {
      if (s.hop.sender().value == u && s.hop.receiver().value == dead && s.phase != Phase::InRound) {
        doomed.push_back(id);
      }
    }
    for (const auto id : doomed) abort_session(id, "link_dead");
  }

  // ---- store and forward -------------------------------------------------

  PathQuery query() const {
    PathQuery q;
    q.q = p_.q;
    q.max_paths = p_.max_paths;
    q.alive_only = p_.decision.policy == Policy::BaselineOlsr;
    return q;
  }

  void on_service(std::uint32_t u) {
    auto& node = nodes_[u];
    node.service_pending = false;
    pump_backlog(u);
    const auto pq = query();
    auto decider = [&](const Tpdu& t) {
      const auto& paths = node.cache.paths(node.ls.view(), NodeId(u), t.dst, pq);
      return decide(paths, t.size, p_.decision);
    };
    auto admit = [&](const Tpdu&, const Decision& d) {
      return !pair_sessions_.contains({u, d.path->next_hop().value});
    };
    for (auto& ev : node.store.reevaluate(node.ls.view().generation, decider, admit)) {
      if (ev.dequeued) {
        start_session(u, std::move(ev.tpdu), ev.decision.path->next_hop().value);
      } else if (trace_ != nullptr) {
        const std::string verdict = ev.decision.forward ? "busy" : std::string(to_string(ev.decision.reason));
        auto& last = node.last_verdict[ev.tpdu.dst];
        if (last != verdict) {
          last = verdict;
          emit({{"event", "hold"}, {"node", u}, {"dst", ev.tpdu.dst.value}, {"reason", verdict}});
        }
      }
    }
    request_medium();
  }

  void pump_backlog(std::uint32_t u) {
    auto& node = nodes_[u];
    const double floor = p_.source_reserve * static_cast<double>(node.ledger.capacity());
    while (!node.backlog.empty()) {
      const auto& t = node.backlog.front();
      const bool fits = static_cast<double>(node.ledger.available()) >= static_cast<double>(t.size) + floor;
      if (!fits && node.ledger.used() != 0) break;
      if (!node.ledger.try_reserve(t.size)) break;
      emit({{"event", "admit"}, {"node", u}, {"tpdu", to_string(t.id)}});
      node.store.push_back(std::move(node.backlog.front()));
      node.backlog.pop_front();
    }
  }

  void on_traffic(std::uint64_t k) {
    auto& src = sources_[k];
    const std::uint32_t u = src.node().value;
    auto& node = nodes_[u];
    FileRecord file;
    file.id = files_.size();
    file.src = src.node();
    file.dst = src.pick_destination();
    file.size = src.spec().file_size;
    file.created_at = now_;
    const auto plans = fragment(file.size, p_.tpdu_max, p_.frame_bytes);
    remaining_.push_back(plans.size());
    for (const auto& plan : plans) {
      Tpdu t = make_tpdu(TpduId{file.src, node.tpdu_counter++}, file.src, file.dst, plan.size, p_.frame_bytes, now_);
      t.file_id = file.id;
      holders_[t.id] = 1;
      node.backlog.push_back(std::move(t));
    }
    emit({{"event", "file"}, {"id", file.id}, {"src", file.src.value}, {"dst", file.dst.value}, {"size", file.size}});
    files_.push_back(std::move(file));
    request_service(u);
    const Seconds next = src.next_arrival();
    if (next <= traffic_stop()) push(next, EventKind::TrafficArrival, {Ev::Traffic, 0, 0, k});
  }

  // ---- hop transport -----------------------------------------------------

  void start_session(std::uint32_t u, Tpdu tpdu, std::uint32_t v) {
    const auto id = next_session_++;
    Tpdu blank = make_tpdu(tpdu.id, tpdu.src, tpdu.dst, tpdu.size, tpdu.fragment_size, tpdu.created_at);
    blank.file_id = tpdu.file_id;
    emit({{"event", "forward"}, {"node", u}, {"next", v}, {"tpdu", to_string(tpdu.id)}});
    sessions_.emplace(id, Session(id, HopSession(std::move(tpdu), NodeId(u), NodeId(v), p_.max_attempts),
                                  ReceiveState(std::move(blank))));
    pair_sessions_[{u, v}] = id;
  }

  std::uint64_t ack_bits(std::size_t fragments) const { return 8 * (kAckHeaderBytes + (fragments + 7) / 8); }

  void on_medium() {
    medium_pending_ = false;
    std::map<std::uint32_t, std::vector<std::uint64_t>> ready;
    for (const auto& [id, s] : sessions_) {
      if (s.phase != Phase::Ready && s.phase != Phase::NeedRequest) continue;
      ready[s.hop.sender().value].push_back(id);
    }
    std::vector<std::uint32_t> senders;
    for (const auto& [tx, _] : ready) senders.push_back(tx);
    for (std::size_t i = senders.size(); i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(senders[i - 1], senders[pick(medium_)]);
    }
    for (const auto tx : senders) {
      if (nodes_[tx].busy) continue;
      std::vector<std::uint64_t> options;
      for (const auto id : ready[tx]) {
        if (!nodes_[sessions_.at(id).hop.receiver().value].busy) options.push_back(id);
      }
      if (options.empty()) continue;
      std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
      start_round(sessions_.at(options[pick(medium_)]));
    }
  }

  void start_round(Session& s) {
    const auto tx = s.hop.sender().value;
    const auto rx = s.hop.receiver().value;
    const auto& tpdu = s.hop.tpdu();
    Seconds t = now_;
    bool reached = true;
    s.pending.clear();
    const bool request = s.phase == Phase::NeedRequest;
    if (request) {
      const auto out = frame_transit(link_state(tx, rx, t), ack_bits(0), p_.frame_overhead, channel_);
      reached = out.delivered;
      t += out.duration;
    } else {
      for (const auto k : s.hop.outstanding().indices()) {
        const auto out = frame_transit(link_state(tx, rx, t), tpdu.fragment_bytes(k) * 8, p_.frame_overhead, channel_);
        if (out.delivered) s.pending.push_back(k);
        t += out.duration;
      }
    }
    const auto ack = frame_transit(link_state(rx, tx, t), ack_bits(tpdu.fragment_count()), p_.frame_overhead, channel_);
    t += ack.duration;
    s.ack_delivered = reached && ack.delivered;
    s.round_time = t - now_;
    s.airtime += s.round_time;
    s.phase = Phase::InRound;
    nodes_[tx].busy = nodes_[rx].busy = true;
    emit({{"event", "round"}, {"tx", tx}, {"rx", rx}, {"tpdu", to_string(tpdu.id)}, {"start", now_}, {"end", t},
          {"request", request}, {"sent", request ? 0 : s.hop.outstanding().count()}, {"received", s.pending.size()},
          {"ack", s.ack_delivered}});
    push(t, EventKind::FrameArrival, {Ev::RoundEnd, 0, 0, s.id});
  }

  void on_round_end(std::uint64_t id) {
    auto& s = sessions_.at(id);
    const auto tx = s.hop.sender().value;
    const auto rx = s.hop.receiver().value;
    nodes_[tx].busy = nodes_[rx].busy = false;
    for (const auto k : s.pending) s.recv.receive(k);
    s.pending.clear();
    if (s.recv.complete() && !s.custody_taken) {
      s.custody_taken = true;
      take_custody(rx, s.recv.tpdu());
    }
    request_service(tx);
    request_medium();
    if (!s.ack_delivered) {
      if (!nodes_[tx].ls.neighbor_alive(NodeId(rx))) {
        abort_session(id, "link_dead");
        return;
      }
      s.phase = Phase::Waiting;
      push(now_ + 2.0 * s.round_time, EventKind::Timer, {Ev::AckTimeout, 0, 0, id});
      return;
    }
    const auto ack = s.recv.make_ack(nodes_[rx].ledger.available());
    nodes_[tx].ls.record_storage(NodeId(rx), ack.available_storage, now_);
    const auto outcome = s.hop.on_batch_ack(ack);
    if (std::holds_alternative<Complete>(outcome)) {
      complete_session(id);
    } else if (std::holds_alternative<Abort>(outcome)) {
      abort_session(id, "attempts");
    } else if (!nodes_[tx].ls.neighbor_alive(NodeId(rx))) {
      abort_session(id, "link_dead");
    } else {
      ++retransmission_rounds_;
      s.phase = Phase::Ready;
    }
  }

  void on_ack_timeout(std::uint64_t id) {
    const auto it = sessions_.find(id);
    if (it == sessions_.end() || it->second.phase != Phase::Waiting) return;
    it->second.phase = Phase::NeedRequest;
    request_medium();
  }

  void release_custody(std::uint32_t u, const Tpdu& t) {
    auto& count = holders_[t.id];
    if (count == 0) {
      ++custody_violations_;
    } else {
      --count;
    }
    nodes_[u].ledger.release(t.size);
  }

  void complete_session(std::uint64_t id) {
    auto it = sessions_.find(id);
    auto& s = it->second;
    const auto tx = s.hop.sender().value;
    const auto& tpdu = s.hop.tpdu();
    ++hop_completions_;
    files_[tpdu.file_id].hops.push_back(HopRecord{tpdu.size, s.airtime});
    emit({{"event", "hop_complete"}, {"tx", tx}, {"rx", s.hop.receiver().value}, {"tpdu", to_string(tpdu.id)},
          {"airtime", s.airtime}});
    release_custody(tx, tpdu);
    pair_sessions_.erase({tx, s.hop.receiver().value});
    sessions_.erase(it);
  }

  void abort_session(std::uint64_t id, const char* why) {
    auto it = sessions_.find(id);
    auto& s = it->second;
    const auto tx = s.hop.sender().value;
    ++hop_aborts_;
    emit({{"event", "abort"}, {"tx", tx}, {"rx", s.hop.receiver().value}, {"tpdu", to_string(s.hop.tpdu().id)},
          {"reason", why}});
    nodes_[tx].store.push_front(s.hop.tpdu());
    pair_sessions_.erase({tx, s.hop.receiver().value});
    sessions_.erase(it);
    request_service(tx);
  }

  void take_custody(std::uint32_t rx, const Tpdu& tpdu) {
    if (tpdu.dst.value == rx) {
      deliver(tpdu);
      return;
    }
    auto& node = nodes_[rx];
    if (!node.ledger.try_reserve(tpdu.size)) {
      ++overflow_by_node_[NodeId(rx)];
      dropped_.insert(tpdu.id);
      emit({{"event", "overflow"}, {"node", rx}, {"tpdu", to_string(tpdu.id)}});
      return;
    }
    ++holders_[tpdu.id];
    node.store.push_back(tpdu);
    request_service(rx);
  }

  void deliver(const Tpdu& tpdu) {
    if (!delivered_.insert(tpdu.id).second) {
      ++duplicate_deliveries_;
      return;
    }
    if (!tpdu.complete()) ++integrity_violations_;
    auto& left = remaining_[tpdu.file_id];
    emit({{"event", "deliver"}, {"tpdu", to_string(tpdu.id)}, {"file", tpdu.file_id}});
    if (--left == 0) files_[tpdu.file_id].delivered_at = now_;
  }

  // ---- results -----------------------------------------------------------

  void audit() {
    // Every TPDU still in the network must be held exactly as often as the
    // holder count says, and each ledger must match what its node holds.
    std::map<TpduId, std::size_t> held;
    std::vector<Bytes> bytes(nodes_.size(), 0);
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
      const auto& node = nodes_[u];
      for (const auto dst : node.store.destinations()) {
        for (const auto& id : node.store.order(dst)) ++held[id];
      }
      bytes[u] += node.store.bytes();
      for (const auto& t : node.backlog) {
        ++held[t.id];
      }
    }
    for (const auto& [_, s] : sessions_) {
      ++held[s.hop.tpdu().id];
      bytes[s.hop.sender().value] += s.hop.tpdu().size;
    }
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
      if (bytes[u] != nodes_[u].ledger.used()) ++custody_violations_;
    }
    for (const auto& [id, count] : holders_) {
      const auto it = held.find(id);
      const std::size_t actual = it == held.end() ? 0 : it->second;
      if (actual != count) ++custody_violations_;
      if (count == 0 && !delivered_.contains(id) && !dropped_.contains(id)) ++custody_violations_;
    }
  }

  SimResult finish() {
    audit();
    if (trace_ != nullptr) {
      for (std::uint32_t u = 0; u < nodes_.size(); ++u) {
        const auto& node = nodes_[u];
        emit({{"event", "final"}, {"node", u}, {"stored", node.store.size()}, {"backlog", node.backlog.size()},
              {"used", node.ledger.used()}});
      }
    }
    SimResult result;
    auto& r = result.report;
    fill_file_metrics(r, files_, sc_.duration);
    r.overflow_by_node = overflow_by_node_;
    r.storage_overflow_drops = 0;
    for (const auto& [_, n] : overflow_by_node_) r.storage_overflow_drops += n;
    r.tpdus_delivered = delivered_.size();
    r.duplicate_deliveries = duplicate_deliveries_;
    r.custody_violations = custody_violations_;
    r.integrity_violations = integrity_violations_;
    r.hop_completions = hop_completions_;
    r.hop_aborts = hop_aborts_;
    r.retransmission_rounds = retransmission_rounds_;
    result.files = std::move(files_);
    result.positions = std::move(positions_);
    return result;
  }

  const Scenario& sc_;
  const ProtocolParams& p_;
  std::uint64_t seed_;
  Trace* trace_;
  Rng channel_;
  Rng medium_;
  EventQueue<Payload> queue_;
  Seconds now_ = 0.0;
  bool medium_pending_ = false;

  std::vector<LinkSpec> links_;
  std::vector<LinkSchedule> schedules_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> link_index_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::optional<ManhattanMobility> mobility_;
  std::vector<std::vector<char>> in_range_;
  std::vector<Vec2> positions_;

  std::vector<Node> nodes_;
  std::vector<TrafficSource> sources_;
  std::map<std::uint64_t, Session> sessions_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> pair_sessions_;
  std::uint64_t next_session_ = 0;

  std::vector<FileRecord> files_;
  std::vector<std::size_t> remaining_;
  std::map<TpduId, std::size_t> holders_;
  std::set<TpduId> delivered_;
  std::set<TpduId> dropped_;
  std::map<NodeId, std::size_t> overflow_by_node_;
  std::size_t duplicate_deliveries_ = 0;
  std::size_t custody_violations_ = 0;
  std::size_t integrity_violations_ = 0;
  std::size_t hop_completions_ = 0;
  std::size_t hop_aborts_ = 0;
  std::size_t retransmission_rounds_ = 0;
};

}  // namespace

SimResult simulate(const Scenario& scenario, std::uint64_t seed, Trace* trace) {
  Engine engine(scenario, seed, trace);
  return engine.run();
}

}  // namespace star::sim
