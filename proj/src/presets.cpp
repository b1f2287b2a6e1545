#include <array>
#include <string_view>
#include <utility>

#include "star/scenario.hpp"

namespace star {

namespace {

constexpr std::string_view kLinearOnOff = R"({
  "name": "linear-onoff",
  "duration": 1000,
  "traffic_stop": 800,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "policy": "star",
  "nodes": ["n0", "n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8", "n9"],
  "links": [
    {"a": "n0", "b": "n1", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n1", "b": "n2", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n2", "b": "n3", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n3", "b": "n4", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n4", "b": "n5", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n5", "b": "n6", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n6", "b": "n7", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n7", "b": "n8", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50},
    {"a": "n8", "b": "n9", "kind": "rate_switch", "low": 1e6, "high": 11e6, "min_interval": 20, "max_interval": 50}
  ],
  "traffic": [
    {"kind": "poisson", "mean_interarrival": 10, "file_size": 262144}
  ]
})";

constexpr std::string_view kMeshPoisson = R"({
  "name": "mesh-25-poisson",
  "duration": 1000,
  "traffic_stop": 800,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "policy": "star",
  "nodes": 25,
  "placement": {"width": 500, "height": 500, "range": 250},
  "traffic": [
    {"kind": "poisson", "mean_interarrival": 5, "file_size": 262144}
  ]
})";

constexpr std::string_view kMeshBursty = R"({
  "name": "mesh-25-bursty",
  "duration": 1000,
  "traffic_stop": 800,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "policy": "star",
  "nodes": 25,
  "placement": {"width": 500, "height": 500, "range": 250},
  "traffic": [
    {"kind": "bursty", "mean_interarrival": 1, "burst": 100, "quiet": 200, "file_size": 262144}
  ]
})";

constexpr std::string_view kManhattan = R"({
  "name": "manhattan-25",
  "duration": 1000,
  "traffic_stop": 800,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "policy": "star",
  "nodes": 25,
  "mobility": {"kind": "manhattan", "width": 500, "height": 500, "spacing": 100,
               "speed_min": 5, "speed_max": 10, "range": 250},
  "traffic": [
    {"kind": "poisson", "mean_interarrival": 10, "file_size": 262144}
  ]
})";

constexpr std::string_view kBottleneck = R"({
  "name": "bottleneck-mesh",
  "duration": 1000,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "policy": "star",
  "nodes": ["S1", "S2", "S3", "C", "D1", "D2", "D3"],
  "links": [
    {"a": "S1", "b": "C", "kind": "static", "rate": 11e6},
    {"a": "S2", "b": "C", "kind": "static", "rate": 11e6},
    {"a": "S3", "b": "C", "kind": "static", "rate": 11e6},
    {"a": "C", "b": "D1", "kind": "static", "rate": 11e6},
    {"a": "C", "b": "D2", "kind": "static", "rate": 11e6},
    {"a": "C", "b": "D3", "kind": "static", "rate": 11e6}
  ],
  "traffic": [
    {"kind": "poisson", "mean_interarrival": 1.0, "file_size": 512000, "sources": ["S1"], "dst": "D1"},
    {"kind": "poisson", "mean_interarrival": 1.0, "file_size": 512000, "sources": ["S2"], "dst": "D2"},
    {"kind": "poisson", "mean_interarrival": 1.0, "file_size": 512000, "sources": ["S3"], "dst": "D3"}
  ]
})";

constexpr std::string_view kPeriodicDisconnect = R"({
  "name": "periodic-disconnect",
  "duration": 1000,
  "traffic_stop": 900,
  "seeds": [1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
  "policy": "star",
  "nodes": ["S", "A", "B", "E", "D", "G"],
  "links": [
    {"a": "S", "b": "A", "kind": "static", "rate": 11e6},
    {"a": "A", "b": "B", "kind": "on_off", "rate": 11e6, "on": 200, "off": 40, "phase": 100},
    {"a": "B", "b": "E", "kind": "static", "rate": 11e6},
    {"a": "E", "b": "D", "kind": "on_off", "rate": 11e6, "on": 200, "off": 40, "phase": 250},
    {"a": "E", "b": "G", "kind": "static", "rate": 11e6},
    {"a": "G", "b": "D", "kind": "static", "rate": 11e6}
  ],
  "traffic": [
    {"kind": "constant", "interval": 5, "file_size": 262144, "sources": ["S"], "dst": "D"}
  ]
})";

constexpr std::array<std::pair<std::string_view, std::string_view>, 6> kPresets{{
    {"linear-onoff", kLinearOnOff},
    {"mesh-25-poisson", kMeshPoisson},
    {"mesh-25-bursty", kMeshBursty},
    {"manhattan-25", kManhattan},
    {"bottleneck-mesh", kBottleneck},
    {"periodic-disconnect", kPeriodicDisconnect},
}};

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, _] : kPresets) out.emplace_back(name);
  return out;
}

std::optional<std::string> preset_text(std::string_view name) {
  for (const auto& [n, text] : kPresets) {
    if (n == name) return std::string(text);
  }
  return std::nullopt;
}

}  // namespace star
