// Small builders shared by the test binaries.
#pragma once

#include <array>
#include <random>
#include <string>

#include "oracles.hpp"
#include "star/link_state.hpp"
#include "star/scenario.hpp"

namespace fixture {

/// Both directions of every edge, each with its own random rate and a
/// matching one-sample long-term cost. Every node advertises a random
/// amount of free storage.
inline star::TopologyView make_view(const oracle::Graph& g, std::mt19937_64& rng,
                                    star::Bytes capacity = 2560 * 1024) {
  static constexpr std::array<star::BitsPerSecond, 5> rates{1'000'000, 2'000'000, 5'500'000, 6'000'000,
                                                            11'000'000};
  star::TopologyView view;
  view.storage_capacity = capacity;
  for (std::size_t u = 0; u < g.size(); ++u) {
    view.storage[star::NodeId(std::uint32_t(u))] = rng() % (capacity + 1);
    for (const auto v : g[u]) {
      star::LinkRecord rec;
      rec.from = star::NodeId(std::uint32_t(u));
      rec.to = star::NodeId(std::uint32_t(v));
      rec.last_rate = rates[rng() % rates.size()];
      rec.short_eptt = star::eptt(8192, rec.last_rate);
      rec.long_eptt = star::eptt(8192, rates[rng() % rates.size()]);
      rec.has_long = true;
      view.links[star::LinkKey{rec.from, rec.to}] = rec;
    }
  }
  return view;
}

inline oracle::Graph edges_to_graph(std::size_t n, std::initializer_list<std::pair<std::size_t, std::size_t>> edges) {
  oracle::Graph g(n);
  for (const auto& [a, b] : edges) {
    g[a].push_back(b);
    g[b].push_back(a);
  }
  return g;
}

inline star::Scenario scenario(const std::string& json_text) { return star::parse_scenario_text(json_text); }

}  // namespace fixture
