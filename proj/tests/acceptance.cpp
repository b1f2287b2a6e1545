// Acceptance suite: one PASS/FAIL line per criterion.
//
//   star_acceptance            run every criterion
//   star_acceptance 4 5        run a subset
//
// Exit status is nonzero when any selected criterion fails.
#include <algorithm>
#include <array>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "decision_cases.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "star/cli.hpp"
#include "star/multipath.hpp"
#include "star/scenario.hpp"
#include "star/sim/link_model.hpp"

using namespace star;

namespace {

// Pinned thresholds.
constexpr int kGraphs = 200;
constexpr std::size_t kMaxGraphNodes = 12;
constexpr double kEdgeProbLo = 0.3;
constexpr double kEdgeProbHi = 0.6;
constexpr double kMultipathBudget = 60.0;

constexpr int kDecisionTuples = 10000;
constexpr double kDecisionBudget = 5.0;

constexpr std::uint64_t kTransportSeeds = 100;
constexpr double kTransportLoss = 0.2;
constexpr double kTransportBudget = 60.0;

constexpr double kDtnDeliveryFloor = 0.95;
constexpr int kDirectionalWins = 8;  // of 10 seeds
constexpr double kBottleneckLoadFactor = 1.5;

constexpr int kLinkStateSequences = 10000;
constexpr double kLinkStateBudget = 10.0;

const std::vector<std::uint64_t> kTenSeeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<MetricsReport> reports(const std::vector<SeedRun>& runs) {
  std::vector<MetricsReport> out;
  for (const auto& r : runs) out.push_back(r.report);
  return out;
}

std::pair<std::vector<MetricsReport>, std::vector<MetricsReport>> both_policies(Scenario sc) {
  sc.params.decision.policy = Policy::Star;
  auto star_runs = reports(run_seeds(sc, kTenSeeds, false));
  sc.params.decision.policy = Policy::BaselineOlsr;
  auto base_runs = reports(run_seeds(sc, kTenSeeds, false));
  return {std::move(star_runs), std::move(base_runs)};
}

double b_safe_ratio(double a, double b) { return b == 0.0 ? (a == 0.0 ? 1.0 : 0.0) : a / b; }

int count_if_pairs(const std::vector<MetricsReport>& a, const std::vector<MetricsReport>& b,
                   const std::function<bool(const MetricsReport&, const MetricsReport&)>& pred) {
  int n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += pred(a[i], b[i]) ? 1 : 0;
  return n;
}

// ---- 1 ----------------------------------------------------------------------

Outcome multipath_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  std::size_t queries = 0, mismatches = 0, paths = 0;
  for (int g_i = 0; g_i < kGraphs; ++g_i) {
    const auto g = oracle::random_connected_graph(rng, kMaxGraphNodes, kEdgeProbLo, kEdgeProbHi);
    const auto view = fixture::make_view(g, rng);
    for (std::size_t s = 0; s < g.size(); ++s) {
      for (std::size_t d = 0; d < g.size(); ++d) {
        if (s == d) continue;
        for (std::size_t q = 0; q <= 2; ++q) {
          const auto found =
              find_paths(view, NodeId(std::uint32_t(s)), NodeId(std::uint32_t(d)), PathQuery{q, 0, false});
          std::set<std::vector<std::size_t>> got;
          for (const auto& p : found) {
            std::vector<std::size_t> v;
            for (const auto h : p.hops) v.push_back(h.value);
            got.insert(v);
          }
          const auto want = oracle::simple_paths(g, s, d, q);
          ++queries;
          paths += want.size();
          if (got != want || got.size() != found.size()) ++mismatches;
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {mismatches == 0 && elapsed < kMultipathBudget,
          fmt("multipath oracle: %d graphs, %zu queries, %zu paths, %zu mismatches, %.2f s (< %.0f s)", kGraphs,
              queries, paths, mismatches, elapsed, kMultipathBudget)};
}

// ---- 2 ----------------------------------------------------------------------

Outcome decision_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  int mismatches = 0, on_line = 0, ratio_edge = 0, payload_edge = 0, payload_short = 0;
  for (int i = 0; i < kDecisionTuples; ++i) {
    const auto c = fixture::random_decision_case(rng);
    if (fixture::verdict_of(fixture::run_decide(c)) != oracle::decide(c)) ++mismatches;
    if (c.has_path && !c.baseline && c.x < kSaturated) {
      on_line += c.y == c.x - c.beta ? 1 : 0;
      ratio_edge += double(c.storage) / double(c.capacity) == c.gamma ? 1 : 0;
      payload_edge += c.storage == c.payload ? 1 : 0;
      payload_short += c.storage < c.payload && double(c.storage) / double(c.capacity) >= c.gamma ? 1 : 0;
    }
  }
  const double elapsed = seconds_since(start);
  const bool covered = on_line > 0 && ratio_edge > 0 && payload_edge > 0 && payload_short > 0;
  return {mismatches == 0 && covered && elapsed < kDecisionBudget,
          fmt("decision oracle: %d tuples, %d mismatches; boundary hits y=x-beta %d, ratio=gamma %d, "
              "storage=payload %d, ratio ok but payload too big %d; %.2f s (< %.0f s)",
              kDecisionTuples, mismatches, on_line, ratio_edge, payload_edge, payload_short, elapsed,
              kDecisionBudget)};
}

// ---- 3 ----------------------------------------------------------------------

Outcome transport_integrity() {
  const auto start = std::chrono::steady_clock::now();
  auto sc = fixture::scenario(R"({
    "name": "lossy-line", "duration": 600, "traffic_stop": 200, "nodes": ["A", "B", "C", "D"],
    "links": [
      {"a": "A", "b": "B", "kind": "static", "rate": 11e6},
      {"a": "B", "b": "C", "kind": "static", "rate": 11e6},
      {"a": "C", "b": "D", "kind": "static", "rate": 11e6}
    ],
    "traffic": [{"kind": "constant", "interval": 10, "sources": ["A"], "dst": "D", "file_size": 262144}]
  })");
  for (auto& l : sc.links) l.model.loss_rate = kTransportLoss;
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= kTransportSeeds; ++s) seeds.push_back(s);
  const auto runs = run_seeds(sc, seeds, false);

  std::size_t offered = 0, delivered = 0, custody = 0, integrity = 0, dup = 0, accounting = 0, retx = 0;
  for (const auto& r : runs) {
    offered += r.report.files_offered;
    delivered += r.report.files_delivered;
    custody += r.report.custody_violations;
    integrity += r.report.integrity_violations;
    dup += r.report.duplicate_deliveries;
    retx += r.report.retransmission_rounds;
    // Every delivered TPDU closed exactly one hop per link of the line.
    if (r.report.hop_completions != 3 * r.report.tpdus_delivered) ++accounting;
  }
  const double elapsed = seconds_since(start);
  const bool pass = offered > 0 && delivered == offered && custody == 0 && integrity == 0 && dup == 0 &&
                    accounting == 0 && elapsed < kTransportBudget;
  return {pass, fmt("transport integrity: %zu seeds, %zu/%zu files delivered, %zu retransmission rounds, "
                    "custody violations %zu, integrity violations %zu, duplicates %zu, hop accounting "
                    "mismatches %zu, %.2f s (< %.0f s)",
                    runs.size(), delivered, offered, retx, custody, integrity, dup, accounting, elapsed,
                    kTransportBudget)};
}

// ---- 4 ----------------------------------------------------------------------

Outcome dtn_delivery() {
  const auto sc = load_scenario("preset:periodic-disconnect");

  std::vector<sim::LinkSchedule> onoff;
  sim::Rng rng(0);
  for (const auto& l : sc.links) {
    if (l.model.kind == sim::LinkKind::OnOff) onoff.emplace_back(l.model, sc.duration, rng);
  }
  std::vector<Seconds> edges{0.0, sc.duration};
  for (const auto& s : onoff) {
    const auto c = s.change_times();
    edges.insert(edges.end(), c.begin(), c.end());
  }
  std::sort(edges.begin(), edges.end());
  bool overlap = onoff.size() != 2;
  for (std::size_t i = 0; !overlap && i + 1 < edges.size(); ++i) {
    const Seconds mid = (edges[i] + edges[i + 1]) / 2.0;
    overlap = !onoff[0].at(mid).on && !onoff[1].at(mid).on;
  }

  const auto [star_r, base_r] = both_policies(sc);
  std::size_t offered = 0, delivered = 0;
  bool base_delivers = true;
  for (std::size_t i = 0; i < star_r.size(); ++i) {
    offered += star_r[i].files_offered;
    delivered += star_r[i].files_delivered;
    base_delivers = base_delivers && base_r[i].files_delivered > 0;
  }
  const double fraction = offered == 0 ? 0.0 : double(delivered) / double(offered);
  const int wins = count_if_pairs(star_r, base_r, [](const MetricsReport& s, const MetricsReport& b) {
    return s.files_delivered >= b.files_delivered;
  });
  const bool pass = !overlap && fraction >= kDtnDeliveryFloor && base_delivers && wins >= kDirectionalWins;
  return {pass, fmt("periodic-disconnect: STAR delivered %zu/%zu (%.3f >= %.2f), scheduled links simultaneously "
                    "off: %s, baseline delivers in every seed: %s, STAR files >= baseline in %d/10 (>= %d)",
                    delivered, offered, fraction, kDtnDeliveryFloor, overlap ? "yes" : "no",
                    base_delivers ? "yes" : "no", wins, kDirectionalWins)};
}

// ---- 5 ----------------------------------------------------------------------

Outcome bottleneck_backpressure() {
  const auto sc = load_scenario("preset:bottleneck-mesh");
  const auto relay = sc.node_id("C", "relay");

  // Everything crosses C twice on a half-duplex radio.
  BitsPerSecond relay_rate = 0;
  for (const auto& l : sc.links) {
    if (l.a == relay || l.b == relay) relay_rate = std::max(relay_rate, l.model.rate);
  }
  const double relay_capacity = double(relay_rate) / 2.0;
  double offered_bps = 0.0;
  for (const auto& t : sc.traffic) {
    offered_bps += double(t.sources.size()) * double(t.file_size) * 8.0 / t.mean_interarrival;
  }
  const double load_factor = offered_bps / relay_capacity;

  const auto [star_r, base_r] = both_policies(sc);
  auto at_relay = [&](const MetricsReport& r) {
    const auto it = r.overflow_by_node.find(relay);
    return it == r.overflow_by_node.end() ? std::size_t(0) : it->second;
  };
  std::size_t star_max = 0, base_min = ~std::size_t(0);
  for (std::size_t i = 0; i < star_r.size(); ++i) {
    star_max = std::max(star_max, at_relay(star_r[i]));
    base_min = std::min(base_min, at_relay(base_r[i]));
  }
  const int wins = count_if_pairs(star_r, base_r, [](const MetricsReport& s, const MetricsReport& b) {
    return s.network_throughput >= b.network_throughput;
  });
  const bool pass = load_factor >= kBottleneckLoadFactor && star_max == 0 && base_min > 0 && wins >= kDirectionalWins;
  return {pass, fmt("bottleneck-mesh: offered %.2f Mbps = %.2fx relay capacity (>= %.1fx), STAR relay overflow max "
                    "%zu (== 0), baseline relay overflow min %zu (> 0), STAR throughput >= baseline in %d/10 (>= %d)",
                    offered_bps / 1e6, load_factor, kBottleneckLoadFactor, star_max, base_min, wins,
                    kDirectionalWins)};
}

// ---- 6 ----------------------------------------------------------------------

Outcome onoff_linear() {
  const std::vector<std::string> loads{"50", "10", "1"};
  bool pass = true;
  std::string detail = "linear-onoff:";
  for (std::size_t i = 0; i < loads.size(); ++i) {
    auto sc = load_scenario("preset:linear-onoff");
    apply_param(sc, "mean_interarrival", loads[i]);
    const auto [star_r, base_r] = both_policies(sc);
    const int thr = count_if_pairs(star_r, base_r, [](const MetricsReport& s, const MetricsReport& b) {
      return s.network_throughput >= b.network_throughput;
    });
    double ratio_sum = 0.0;
    for (std::size_t k = 0; k < star_r.size(); ++k) {
      ratio_sum += b_safe_ratio(star_r[k].network_throughput, base_r[k].network_throughput);
    }
    bool ok = thr >= kDirectionalWins;
    detail += fmt(" [mean %ss: throughput >= baseline %d/10 (>= %d), mean ratio %.2f", loads[i].c_str(), thr,
                  kDirectionalWins, ratio_sum / double(star_r.size()));
    if (i > 0) {
      const int slower = count_if_pairs(star_r, base_r, [](const MetricsReport& s, const MetricsReport& b) {
        return s.avg_file_delay.value_or(0.0) >= b.avg_file_delay.value_or(0.0);
      });
      ok = ok && slower * 2 > int(star_r.size());
      detail += fmt(", delay >= baseline %d/10 (majority)", slower);
    }
    detail += ok ? " ok]" : " FAIL]";
    pass = pass && ok;
  }
  return {pass, detail};
}

// ---- 7 ----------------------------------------------------------------------

Outcome determinism() {
  const std::vector<std::uint64_t> seeds{1, 2};
  std::size_t checked = 0, differing = 0;
  for (const auto& name : preset_names()) {
    auto sc = load_scenario("preset:" + name);
    for (const auto policy : {Policy::Star, Policy::BaselineOlsr}) {
      sc.params.decision.policy = policy;
      std::ostringstream a, b;
      write_aggregate_csv(a, reports(run_seeds(sc, seeds, false, 1)));
      write_aggregate_csv(b, reports(run_seeds(sc, seeds, false, 2)));
      ++checked;
      if (a.str() != b.str()) ++differing;
    }
  }
  return {differing == 0,
          fmt("determinism: %zu preset/policy replays of seeds 1-2 (serial vs threaded), %zu aggregate CSVs differ",
              checked, differing)};
}

// ---- 8 ----------------------------------------------------------------------

Outcome link_state_invariants() {
  const auto start = std::chrono::steady_clock::now();
  static constexpr std::array<BitsPerSecond, 5> rates{1'000'000, 2'000'000, 5'500'000, 6'000'000, 11'000'000};
  std::mt19937_64 rng(8);
  std::size_t steps = 0, saturations = 0, violations = 0, revivals = 0;
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };
  for (int s = 0; s < kLinkStateSequences; ++s) {
    const std::size_t window = 1 + rng() % 12;
    LinkStateConfig cfg;
    cfg.self = NodeId(0);
    cfg.smoothing = SmoothingConfig{SmoothingMode::Window, window, 0.9};
    LinkStateNode node(cfg);
    oracle::LinkReference ref(window, cfg.frame_bytes * 8);
    std::uint64_t seq = 0;
    bool was_dead = false;
    const int length = 1 + int(rng() % 50);
    for (int k = 0; k < length; ++k, ++steps) {
      std::optional<double> long_before;
      if (const auto* l = node.view().find(NodeId(1), NodeId(0))) long_before = l->long_eptt;
      if (rng() % 3 == 0) {
        HelloMsg h;
        h.origin = NodeId(1);
        h.seq = ++seq;
        const auto rate = rates[rng() % rates.size()];
        node.process_hello(h, rate, k);
        ref.hello(rate);
        if (was_dead) ++revivals;
        was_dead = false;
      } else {
        const bool killed = node.on_hello_timeout(NodeId(1), k);
        if (killed != ref.timeout()) ++violations;
        if (killed) {
          ++saturations;
          was_dead = true;
          // Long-term cost is frozen by the failure.
          const auto* l = node.view().find(NodeId(1), NodeId(0));
          if (!long_before || l->long_eptt != *long_before) ++violations;
        }
      }
      const auto* l = node.view().find(NodeId(1), NodeId(0));
      if (!ref.known()) {
        if (l != nullptr) ++violations;
        continue;
      }
      if (l == nullptr || l->alive != ref.alive() || l->missed_hellos != std::min(ref.missed(), 3)) {
        ++violations;
        continue;
      }
      if (!ref.alive() && l->short_eptt != kSaturated) ++violations;
      if (ref.missed() > 0 && ref.missed() < 3 && l->short_eptt >= kSaturated) ++violations;
      if (!close(l->short_eptt, ref.short_cost())) ++violations;
      if (!close(l->long_eptt, *ref.long_cost())) ++violations;
      if (!close(l->long_eptt, ref.naive_mean())) ++violations;
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && saturations > 0 && revivals > 0 && elapsed < kLinkStateBudget,
          fmt("link-state invariants: %d sequences, %zu steps, %zu saturations, %zu revivals, %zu violations, "
              "%.2f s (< %.0f s)",
              kLinkStateSequences, steps, saturations, revivals, violations, elapsed, kLinkStateBudget)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::function<Outcome()>> criteria{
      {1, multipath_oracle},   {2, decision_oracle}, {3, transport_integrity}, {4, dtn_delivery},
      {5, bottleneck_backpressure}, {6, onoff_linear}, {7, determinism},   {8, link_state_invariants},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::stoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [k, _] : criteria) selected.push_back(k);
  }
  bool all = true;
  for (const auto k : selected) {
    const auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << k << '\n';
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
