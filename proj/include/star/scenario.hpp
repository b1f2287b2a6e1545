// Declarative scenario description: topology or mobility, link models,
// traffic, protocol parameters and run settings, loaded from JSON.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "star/core.hpp"
#include "star/decision.hpp"
#include "star/link_state.hpp"
#include "star/sim/link_model.hpp"
#include "star/sim/mobility.hpp"
#include "star/sim/traffic.hpp"

namespace star {

/// Malformed or semantically invalid scenario. `field` is a JSON path such
/// as "links[2].rate".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct LinkSpec {
  NodeId a;
  NodeId b;
  sim::LinkModelSpec model;
};

/// Rate used for node pairs at most `distance` apart.
struct RateTier {
  double distance = 0.0;
  BitsPerSecond rate = 0;
};

/// Random static placement; links join every pair within range.
struct PlacementSpec {
  double width = 500.0;
  double height = 500.0;
  double range = 250.0;
  std::vector<RateTier> tiers;
  double loss_rate = 0.0;
};

struct MobilitySpec {
  sim::ManhattanSpec grid;
  double range = 250.0;
  std::vector<RateTier> tiers;
  double loss_rate = 0.0;
};

struct ProtocolParams {
  DecisionParams decision;
  SmoothingConfig smoothing;
  std::size_t q = 1;
  std::size_t max_paths = 32;
  Seconds hello_interval = 2.0;
  Seconds tc_interval = 5.0;
  Bytes storage_capacity = 2560 * 1024;
  Bytes tpdu_max = kMaxTpduBytes;
  Bytes frame_bytes = kDefaultFrameBytes;
  Seconds frame_overhead = 0.0;
  int max_attempts = 4;
  // Locally generated data waits at the application until the store keeps
  // at least this fraction free after admitting it.
  double source_reserve = 0.9;
  Seconds control_hop_delay = 1e-3;
};

struct Scenario {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<LinkSpec> links;
  std::optional<PlacementSpec> placement;
  std::optional<MobilitySpec> mobility;
  std::vector<sim::TrafficSpec> traffic;
  ProtocolParams params;
  Seconds duration = 1000.0;
  std::optional<Seconds> traffic_stop;  // no new files after this time
  std::vector<std::uint64_t> seeds;

  std::size_t node_count() const { return nodes.size(); }
  /// Index of a node by name; throws ScenarioError naming `field`.
  NodeId node_id(const std::string& name, const std::string& field) const;
};

/// Parses and validates. Throws ScenarioError.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario parse_scenario_text(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Semantic checks; throws ScenarioError on the first violation and returns
/// warnings for legal but degenerate settings.
std::vector<std::string> validate(const Scenario& scenario);

/// Command-line override, e.g. ("gamma", "0.7"). Throws ScenarioError for
/// unknown keys or unparsable values.
void apply_param(Scenario& scenario, const std::string& key, const std::string& value);

Policy parse_policy(const std::string& text);

/// Bundled scenarios.
std::vector<std::string> preset_names();
std::optional<std::string> preset_text(std::string_view name);

/// Accepts a file path or "preset:<name>".
Scenario load_scenario(const std::string& ref);

}  // namespace star
