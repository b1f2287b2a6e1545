#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "star/multipath.hpp"

using namespace star;

namespace {

std::set<std::vector<std::size_t>> as_index_set(const std::vector<PathRecord>& paths) {
  std::set<std::vector<std::size_t>> out;
  for (const auto& p : paths) {
    std::vector<std::size_t> v;
    for (const auto h : p.hops) v.push_back(h.value);
    out.insert(v);
  }
  return out;
}

TopologyView uniform_view(const oracle::Graph& g) {
  TopologyView view;
  view.storage_capacity = 1000;
  for (std::size_t u = 0; u < g.size(); ++u) {
    for (const auto v : g[u]) {
      LinkRecord r;
      r.from = NodeId(std::uint32_t(u));
      r.to = NodeId(std::uint32_t(v));
      r.short_eptt = r.long_eptt = 1.0;
      r.has_long = true;
      view.links[LinkKey{r.from, r.to}] = r;
    }
  }
  return view;
}

}  // namespace

TEST_CASE("line has exactly one path") {
  const auto g = fixture::edges_to_graph(3, {{0, 1}, {1, 2}});
  const auto paths = find_paths(uniform_view(g), NodeId(0), NodeId(2), PathQuery{1, 0, false});
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].hops == std::vector<NodeId>{NodeId(0), NodeId(1), NodeId(2)});
  CHECK(paths[0].length == 2);
  CHECK(paths[0].short_cost == 2.0);
}

TEST_CASE("diamond yields both two-hop paths, ties broken by hops") {
  const auto g = fixture::edges_to_graph(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  const auto paths = find_paths(uniform_view(g), NodeId(0), NodeId(3), PathQuery{1, 0, false});
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].hops[1] == NodeId(1));
  CHECK(paths[1].hops[1] == NodeId(2));
}

TEST_CASE("q bounds the hop slack") {
  // 0-1-7 (2 hops), 0-2-3-7 (3 hops), 0-4-5-6-7 (4 hops)
  const auto g = fixture::edges_to_graph(8, {{0, 1}, {1, 7}, {0, 2}, {2, 3}, {3, 7}, {0, 4}, {4, 5}, {5, 6}, {6, 7}});
  const auto view = uniform_view(g);
  CHECK(find_paths(view, NodeId(0), NodeId(7), PathQuery{0, 0, false}).size() == 1);
  const auto q1 = find_paths(view, NodeId(0), NodeId(7), PathQuery{1, 0, false});
  REQUIRE(q1.size() == 2);
  CHECK(q1[0].length == 2);
  CHECK(q1[1].length == 3);
  CHECK(find_paths(view, NodeId(0), NodeId(7), PathQuery{2, 0, false}).size() == 3);
  CHECK(find_paths(view, NodeId(0), NodeId(7), PathQuery{2, 2, false}).size() == 2);
}

TEST_CASE("annotation") {
  const auto g = fixture::edges_to_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  auto view = uniform_view(g);
  view.storage[NodeId(0)] = 1;
  view.storage[NodeId(1)] = 700;
  view.storage[NodeId(2)] = 400;
  view.storage[NodeId(3)] = 2;
  auto rec = annotate(view, {NodeId(0), NodeId(1), NodeId(2), NodeId(3)});
  CHECK(rec.bottleneck_storage == 400);
  CHECK(rec.bottleneck_ratio() == doctest::Approx(0.4));
  CHECK(rec.short_cost == 3.0);

  SUBCASE("single hop has no intermediate router") {
    const auto one = annotate(view, {NodeId(0), NodeId(1)});
    CHECK(one.bottleneck_storage == 1000);
  }
  SUBCASE("a dead link saturates the whole path") {
    auto& link = view.links[LinkKey{NodeId(1), NodeId(2)}];
    link.short_eptt = kSaturated;
    link.alive = false;
    rec = annotate(view, {NodeId(0), NodeId(1), NodeId(2), NodeId(3)});
    CHECK(rec.short_cost == kSaturated);
    CHECK(find_paths(view, NodeId(0), NodeId(3), PathQuery{1, 0, true}).empty());
    CHECK(find_paths(view, NodeId(0), NodeId(3), PathQuery{1, 0, false}).size() == 1);
  }
}

TEST_CASE("unreachable and trivial queries") {
  const auto g = fixture::edges_to_graph(4, {{0, 1}, {2, 3}});
  const auto view = uniform_view(g);
  CHECK(find_paths(view, NodeId(0), NodeId(3)).empty());
  CHECK(find_paths(view, NodeId(0), NodeId(0)).empty());
}

TEST_CASE("random graphs match exhaustive enumeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const auto g = oracle::random_connected_graph(rng, 10);
    const auto view = fixture::make_view(g, rng);
    for (std::size_t q = 0; q <= 2; ++q) {
      const auto src = rng() % g.size();
      auto dst = rng() % g.size();
      if (dst == src) dst = (dst + 1) % g.size();
      const auto paths = find_paths(view, NodeId(std::uint32_t(src)), NodeId(std::uint32_t(dst)), PathQuery{q, 0, false});
      CHECK(as_index_set(paths) == oracle::simple_paths(g, src, dst, q));
      for (std::size_t i = 1; i < paths.size(); ++i) CHECK(paths[i - 1].short_cost <= paths[i].short_cost);
    }
  }
}

TEST_CASE("route cache follows cost changes and link additions") {
  const auto g = fixture::edges_to_graph(4, {{0, 1}, {1, 3}, {0, 2}, {2, 3}});
  auto view = uniform_view(g);
  RouteCache cache;
  const PathQuery query{1, 0, false};
  CHECK(cache.paths(view, NodeId(0), NodeId(3), query)[0].hops[1] == NodeId(1));

  view.links[LinkKey{NodeId(0), NodeId(1)}].short_eptt = 5.0;
  ++view.generation;
  CHECK(cache.paths(view, NodeId(0), NodeId(3), query)[0].hops[1] == NodeId(2));

  LinkRecord direct;
  direct.from = NodeId(0);
  direct.to = NodeId(3);
  direct.short_eptt = direct.long_eptt = 0.5;
  direct.has_long = true;
  view.links[LinkKey{direct.from, direct.to}] = direct;
  ++view.generation;
  ++view.link_set_version;
  const auto& fresh = cache.paths(view, NodeId(0), NodeId(3), query);
  CHECK(fresh[0].length == 1);
  CHECK(fresh == find_paths(view, NodeId(0), NodeId(3), query));
}
