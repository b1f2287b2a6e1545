// Discrete-event network simulator driving the protocol modules.
//
// Medium model: one transfer round on a link carries every outstanding
// fragment of a TPDU back to back followed by the batch ack, and occupies
// both endpoints for its whole duration (half duplex). Control messages
// (hello, TC) need the link to be up but take no air time.
#pragma once

#include <cstdint>
#include <vector>

#include "star/metrics.hpp"
#include "star/scenario.hpp"
#include "star/trace.hpp"

namespace star::sim {

struct SimResult {
  MetricsReport report;
  std::vector<FileRecord> files;
  std::vector<Vec2> positions;  // initial node positions when placed or mobile
};

SimResult simulate(const Scenario& scenario, std::uint64_t seed, Trace* trace = nullptr);

inline MetricsReport run(const Scenario& scenario, std::uint64_t seed, Trace* trace = nullptr) {
  return simulate(scenario, seed, trace).report;
}

/// Links produced by random placement for a given seed; connected unless
/// no connected draw was found.
std::vector<LinkSpec> place_nodes(const Scenario& scenario, std::uint64_t seed, std::vector<Vec2>* positions = nullptr);

BitsPerSecond tier_rate(const std::vector<RateTier>& tiers, double distance);

}  // namespace star::sim
