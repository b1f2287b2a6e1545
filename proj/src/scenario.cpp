#include "star/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace star {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Reads an object while remembering which keys were used, so typos in
/// scenario files surface as errors instead of silently taking defaults.
class Reader {
 public:
  Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ScenarioError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number()) throw ScenarioError(path(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ScenarioError(path(key), "must be finite");
    return d;
  }
  double required_number(const std::string& key) {
    if (!has(key)) throw ScenarioError(path(key), "is required");
    return number(key, 0.0);
  }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ScenarioError(path(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) throw ScenarioError(path(key), "expected a string");
    return v.get<std::string>();
  }
  std::string required_string(const std::string& key) {
    if (!has(key)) throw ScenarioError(path(key), "is required");
    return string(key, "");
  }

  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!used_.contains(key)) throw ScenarioError(path(key), "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> used_;
};

BitsPerSecond rate_value(double v, const std::string& field) {
  if (!(v > 0.0)) throw ScenarioError(field, "must be positive");
  return static_cast<BitsPerSecond>(std::llround(v));
}

std::vector<RateTier> parse_tiers(Reader& r, const std::string& key) {
  std::vector<RateTier> tiers;
  if (!r.has(key)) {
    // Default rate ladder by distance for a 250 m radio.
    return {{100.0, 11'000'000}, {150.0, 5'500'000}, {200.0, 2'000'000}, {250.0, 1'000'000}};
  }
  const auto& arr = r.raw(key);
  if (!arr.is_array()) throw ScenarioError(r.path(key), "expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Reader t(arr[i], index(r.path(key), i));
    RateTier tier;
    tier.distance = t.required_number("distance");
    tier.rate = rate_value(t.required_number("rate"), t.path("rate"));
    t.finish();
    tiers.push_back(tier);
  }
  return tiers;
}

sim::LinkModelSpec parse_link_model(Reader& r) {
  sim::LinkModelSpec m;
  const std::string kind = r.string("kind", "static");
  if (kind == "static") {
    m.kind = sim::LinkKind::Static;
    m.rate = rate_value(r.number("rate", 11e6), r.path("rate"));
  } else if (kind == "rate_switch") {
    m.kind = sim::LinkKind::RateSwitch;
    m.low = rate_value(r.number("low", 1e6), r.path("low"));
    m.high = rate_value(r.number("high", 11e6), r.path("high"));
    m.min_interval = r.number("min_interval", 20.0);
    m.max_interval = r.number("max_interval", 50.0);
  } else if (kind == "on_off") {
    m.kind = sim::LinkKind::OnOff;
    m.rate = rate_value(r.number("rate", 11e6), r.path("rate"));
    m.on_duration = r.number("on", 200.0);
    m.off_duration = r.number("off", 40.0);
    m.phase = r.number("phase", 0.0);
  } else {
    throw ScenarioError(r.path("kind"), "unknown link kind '" + kind + "' (static, rate_switch, on_off)");
  }
  m.loss_rate = r.number("loss_rate", 0.0);
  return m;
}

void parse_params(Reader& r, ProtocolParams& p) {
  p.decision.beta_offset = r.number("beta_offset", p.decision.beta_offset);
  p.decision.gamma = r.number("gamma", p.decision.gamma);
  const std::string smoothing = r.string("smoothing", "window");
  if (smoothing == "window") {
    p.smoothing.mode = SmoothingMode::Window;
  } else if (smoothing == "ewma") {
    p.smoothing.mode = SmoothingMode::Ewma;
  } else {
    throw ScenarioError(r.path("smoothing"), "expected 'window' or 'ewma'");
  }
  p.smoothing.window = r.count("window", p.smoothing.window);
  p.smoothing.ewma_weight = r.number("ewma_weight", p.smoothing.ewma_weight);
  p.q = r.count("q", p.q);
  p.max_paths = r.count("max_paths", p.max_paths);
  p.hello_interval = r.number("hello_interval", p.hello_interval);
  p.tc_interval = r.number("tc_interval", p.tc_interval);
  p.storage_capacity = r.count("storage_capacity", p.storage_capacity);
  p.tpdu_max = r.count("tpdu_max", p.tpdu_max);
  p.frame_bytes = r.count("frame_bytes", p.frame_bytes);
  p.frame_overhead = r.number("frame_overhead", p.frame_overhead);
  p.max_attempts = static_cast<int>(r.count("max_attempts", static_cast<std::uint64_t>(p.max_attempts)));
  p.source_reserve = r.number("source_reserve", p.source_reserve);
  p.control_hop_delay = r.number("control_hop_delay", p.control_hop_delay);
}

sim::TrafficSpec parse_traffic(Reader& r, const Scenario& sc) {
  sim::TrafficSpec t;
  const std::string kind = r.string("kind", "poisson");
  if (kind == "poisson") {
    t.kind = sim::TrafficKind::Poisson;
  } else if (kind == "bursty") {
    t.kind = sim::TrafficKind::Bursty;
  } else if (kind == "constant") {
    t.kind = sim::TrafficKind::Constant;
  } else {
    throw ScenarioError(r.path("kind"), "unknown traffic kind '" + kind + "' (poisson, bursty, constant)");
  }
  t.mean_interarrival = r.number("mean_interarrival", t.mean_interarrival);
  t.interval = r.number("interval", t.interval);
  t.burst = r.number("burst", t.burst);
  t.quiet = r.number("quiet", t.quiet);
  t.file_size = r.count("file_size", t.file_size);
  t.start = r.number("start", t.start);
  if (r.has("sources")) {
    const auto& arr = r.raw("sources");
    if (!arr.is_array()) throw ScenarioError(r.path("sources"), "expected an array of node names");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto field = index(r.path("sources"), i);
      if (!arr[i].is_string()) throw ScenarioError(field, "expected a node name");
      t.sources.push_back(sc.node_id(arr[i].get<std::string>(), field));
    }
  }
  if (r.has("dst")) t.dst = sc.node_id(r.string("dst", ""), r.path("dst"));
  return t;
}

void check_range(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ScenarioError(field, message);
}

bool connected(std::size_t n, const std::vector<LinkSpec>& links) {
  if (n <= 1) return true;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& l : links) {
    adj[l.a.value].push_back(l.b.value);
    adj[l.b.value].push_back(l.a.value);
  }
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
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

void check_tiers(const std::vector<RateTier>& tiers, double range, const std::string& field) {
  check_range(!tiers.empty(), field, "needs at least one tier");
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    check_range(tiers[i].distance > 0.0, index(field, i) + ".distance", "must be positive");
    if (i > 0) check_range(tiers[i].distance > tiers[i - 1].distance, index(field, i) + ".distance", "tiers must be sorted by distance");
  }
  check_range(tiers.back().distance >= range, field, "last tier must reach the communication range");
}

}  // namespace

Policy parse_policy(const std::string& text) {
  if (text == "star" || text == "STAR") return Policy::Star;
  if (text == "baseline-olsr" || text == "baseline_olsr" || text == "BASELINE_OLSR" || text == "olsr") {
    return Policy::BaselineOlsr;
  }
  throw ScenarioError("policy", "unknown policy '" + text + "' (star, baseline-olsr)");
}

NodeId Scenario::node_id(const std::string& name, const std::string& field) const {
  const auto it = std::find(nodes.begin(), nodes.end(), name);
  if (it == nodes.end()) throw ScenarioError(field, "unknown node '" + name + "'");
  return NodeId(static_cast<std::uint32_t>(it - nodes.begin()));
}

Scenario parse_scenario(const json& doc) {
  Scenario sc;
  Reader r(doc, "");
  sc.name = r.string("name", "scenario");
  sc.duration = r.number("duration", sc.duration);
  if (r.has("traffic_stop")) sc.traffic_stop = r.number("traffic_stop", 0.0);

  if (!r.has("nodes")) throw ScenarioError("nodes", "is required");
  const auto& nodes = r.raw("nodes");
  if (nodes.is_number_integer()) {
    const auto n = nodes.get<std::int64_t>();
    if (n < 1) throw ScenarioError("nodes", "must be at least 1");
    for (std::int64_t i = 0; i < n; ++i) sc.nodes.push_back("n" + std::to_string(i));
  } else if (nodes.is_array()) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (!nodes[i].is_string()) throw ScenarioError(index("nodes", i), "expected a node name");
      sc.nodes.push_back(nodes[i].get<std::string>());
    }
  } else {
    throw ScenarioError("nodes", "expected a count or an array of names");
  }

  if (r.has("params")) {
    Reader p(r.raw("params"), "params");
    parse_params(p, sc.params);
    p.finish();
  }
  if (r.has("policy")) sc.params.decision.policy = parse_policy(r.string("policy", ""));

  if (r.has("links")) {
    const auto& arr = r.raw("links");
    if (!arr.is_array()) throw ScenarioError("links", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader l(arr[i], index("links", i));
      LinkSpec spec;
      spec.a = sc.node_id(l.required_string("a"), l.path("a"));
      spec.b = sc.node_id(l.required_string("b"), l.path("b"));
      spec.model = parse_link_model(l);
      l.finish();
      sc.links.push_back(spec);
    }
  }
  if (r.has("placement")) {
    Reader p(r.raw("placement"), "placement");
    PlacementSpec spec;
    spec.width = p.number("width", spec.width);
    spec.height = p.number("height", spec.height);
    spec.range = p.number("range", spec.range);
    spec.tiers = parse_tiers(p, "tiers");
    spec.loss_rate = p.number("loss_rate", spec.loss_rate);
    p.finish();
    sc.placement = spec;
  }
  if (r.has("mobility")) {
    Reader m(r.raw("mobility"), "mobility");
    const std::string kind = m.string("kind", "manhattan");
    if (kind != "manhattan") throw ScenarioError(m.path("kind"), "unknown mobility kind '" + kind + "' (manhattan)");
    MobilitySpec spec;
    spec.grid.width = m.number("width", spec.grid.width);
    spec.grid.height = m.number("height", spec.grid.height);
    spec.grid.spacing = m.number("spacing", spec.grid.spacing);
    spec.grid.speed_min = m.number("speed_min", spec.grid.speed_min);
    spec.grid.speed_max = m.number("speed_max", spec.grid.speed_max);
    spec.range = m.number("range", spec.range);
    spec.tiers = parse_tiers(m, "tiers");
    spec.loss_rate = m.number("loss_rate", spec.loss_rate);
    m.finish();
    sc.mobility = spec;
  }
  if (r.has("traffic")) {
    const auto& arr = r.raw("traffic");
    if (!arr.is_array()) throw ScenarioError("traffic", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Reader t(arr[i], index("traffic", i));
      sc.traffic.push_back(parse_traffic(t, sc));
      t.finish();
    }
  }
  if (r.has("seeds")) {
    const auto& arr = r.raw("seeds");
    if (!arr.is_array()) throw ScenarioError("seeds", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_unsigned() && !(arr[i].is_number_integer() && arr[i].get<std::int64_t>() >= 0)) {
        throw ScenarioError(index("seeds", i), "expected a non-negative integer");
      }
      sc.seeds.push_back(arr[i].get<std::uint64_t>());
    }
  }
  r.finish();
  validate(sc);
  return sc;
}

Scenario parse_scenario_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("<file>", "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

Scenario load_scenario(const std::string& ref) {
  constexpr std::string_view prefix = "preset:";
  if (ref.rfind(prefix, 0) == 0) {
    const auto name = ref.substr(prefix.size());
    const auto text = preset_text(name);
    if (!text) throw ScenarioError("<preset>", "unknown preset '" + name + "'");
    return parse_scenario_text(*text);
  }
  return load_scenario_file(ref);
}

std::vector<std::string> validate(const Scenario& sc) {
  std::vector<std::string> warnings;
  const auto& p = sc.params;
  check_range(sc.duration > 0.0, "duration", "must be positive");
  if (sc.traffic_stop) check_range(*sc.traffic_stop > 0.0 && *sc.traffic_stop <= sc.duration, "traffic_stop", "must lie in (0, duration]");
  check_range(!sc.nodes.empty(), "nodes", "must not be empty");
  {
    std::set<std::string> names;
    for (std::size_t i = 0; i < sc.nodes.size(); ++i) {
      check_range(!sc.nodes[i].empty(), index("nodes", i), "must not be empty");
      check_range(names.insert(sc.nodes[i]).second, index("nodes", i), "duplicate node name '" + sc.nodes[i] + "'");
    }
  }

  check_range(p.decision.gamma >= 0.0 && p.decision.gamma <= 1.0, "params.gamma", "must lie in [0, 1]");
  check_range(p.decision.beta_offset >= 0.0, "params.beta_offset", "must be non-negative");
  check_range(p.smoothing.window >= 1, "params.window", "must be at least 1");
  check_range(p.smoothing.ewma_weight >= 0.0 && p.smoothing.ewma_weight < 1.0, "params.ewma_weight", "must lie in [0, 1)");
  check_range(p.hello_interval > 0.0, "params.hello_interval", "must be positive");
  check_range(p.tc_interval > 0.0, "params.tc_interval", "must be positive");
  check_range(p.storage_capacity > 0, "params.storage_capacity", "must be positive");
  check_range(p.tpdu_max > 0 && p.tpdu_max <= kMaxTpduBytes, "params.tpdu_max", "must lie in (0, 262144]");
  check_range(p.frame_bytes > 0 && p.frame_bytes <= p.tpdu_max, "params.frame_bytes", "must lie in (0, tpdu_max]");
  check_range(p.frame_overhead >= 0.0, "params.frame_overhead", "must be non-negative");
  check_range(p.max_attempts >= 1, "params.max_attempts", "must be at least 1");
  check_range(p.source_reserve >= 0.0 && p.source_reserve < 1.0, "params.source_reserve", "must lie in [0, 1)");
  check_range(p.control_hop_delay >= 0.0, "params.control_hop_delay", "must be non-negative");
  check_range(p.storage_capacity >= p.tpdu_max, "params.storage_capacity", "must hold at least one TPDU");

  const int topologies = (!sc.links.empty() ? 1 : 0) + (sc.placement ? 1 : 0) + (sc.mobility ? 1 : 0);
  check_range(topologies <= 1, "links", "links, placement and mobility are mutually exclusive");

  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::size_t i = 0; i < sc.links.size(); ++i) {
    const auto& l = sc.links[i];
    const auto f = index("links", i);
    check_range(l.a != l.b, f + ".b", "a link needs two distinct endpoints");
    const auto key = std::minmax(l.a.value, l.b.value);
    check_range(pairs.insert(key).second, f, "duplicate link between " + sc.nodes[l.a.value] + " and " + sc.nodes[l.b.value]);
    const auto& m = l.model;
    check_range(m.loss_rate >= 0.0 && m.loss_rate < 1.0, f + ".loss_rate", "must lie in [0, 1)");
    switch (m.kind) {
      case sim::LinkKind::Static:
        break;
      case sim::LinkKind::RateSwitch:
        check_range(m.min_interval > 0.0, f + ".min_interval", "must be positive");
        check_range(m.max_interval >= m.min_interval, f + ".max_interval", "must be at least min_interval");
        break;
      case sim::LinkKind::OnOff:
        check_range(m.on_duration >= 0.0, f + ".on", "must be non-negative");
        check_range(m.off_duration >= 0.0, f + ".off", "must be non-negative");
        check_range(m.on_duration + m.off_duration > 0.0, f + ".on", "on + off must be positive");
        if (m.off_duration == 0.0) warnings.push_back(f + ".off: zero off duration, link is always on");
        if (m.on_duration == 0.0) warnings.push_back(f + ".on: zero on duration, link is never usable");
        break;
    }
  }
  if (!sc.links.empty() && !connected(sc.nodes.size(), sc.links)) {
    warnings.push_back("links: topology is partitioned");
  }
  if (sc.placement) {
    const auto& pl = *sc.placement;
    check_range(pl.width > 0.0 && pl.height > 0.0, "placement.width", "area must be positive");
    check_range(pl.range > 0.0, "placement.range", "must be positive");
    check_range(pl.loss_rate >= 0.0 && pl.loss_rate < 1.0, "placement.loss_rate", "must lie in [0, 1)");
    check_tiers(pl.tiers, pl.range, "placement.tiers");
  }
  if (sc.mobility) {
    const auto& m = *sc.mobility;
    check_range(m.grid.spacing > 0.0, "mobility.spacing", "must be positive");
    check_range(m.grid.width >= m.grid.spacing && m.grid.height >= m.grid.spacing, "mobility.width",
                "area must span at least one block");
    check_range(m.grid.speed_min > 0.0, "mobility.speed_min", "must be positive");
    check_range(m.grid.speed_max >= m.grid.speed_min, "mobility.speed_max", "must be at least speed_min");
    check_range(m.range > 0.0, "mobility.range", "must be positive");
    check_range(m.loss_rate >= 0.0 && m.loss_rate < 1.0, "mobility.loss_rate", "must lie in [0, 1)");
    check_tiers(m.tiers, m.range, "mobility.tiers");
  }

  for (std::size_t i = 0; i < sc.traffic.size(); ++i) {
    const auto& t = sc.traffic[i];
    const auto f = index("traffic", i);
    check_range(t.file_size > 0, f + ".file_size", "must be positive");
    check_range(t.start >= 0.0, f + ".start", "must be non-negative");
    switch (t.kind) {
      case sim::TrafficKind::Poisson:
        check_range(t.mean_interarrival > 0.0, f + ".mean_interarrival", "must be positive");
        break;
      case sim::TrafficKind::Bursty:
        check_range(t.mean_interarrival > 0.0, f + ".mean_interarrival", "must be positive");
        check_range(t.burst > 0.0, f + ".burst", "must be positive");
        check_range(t.quiet >= 0.0, f + ".quiet", "must be non-negative");
        break;
      case sim::TrafficKind::Constant:
        check_range(t.interval > 0.0, f + ".interval", "must be positive");
        break;
    }
    check_range(sc.nodes.size() >= 2, f, "traffic needs at least two nodes");
    if (t.dst) {
      for (const auto s : t.sources) check_range(s != *t.dst, f + ".dst", "destination equals a source");
      check_range(!t.sources.empty() || sc.nodes.size() >= 2, f + ".dst", "no valid source");
      check_range(!t.sources.empty(), f + ".sources", "required when dst is fixed");
    }
  }
  return warnings;
}

void apply_param(Scenario& sc, const std::string& key, const std::string& value) {
  const auto field = "--param " + key;
  auto number = [&]() {
    try {
      std::size_t used = 0;
      const double d = std::stod(value, &used);
      if (used != value.size() || !std::isfinite(d)) throw std::invalid_argument(value);
      return d;
    } catch (const std::exception&) {
      throw ScenarioError(field, "expected a number, got '" + value + "'");
    }
  };
  auto count = [&]() {
    const double d = number();
    if (d < 0.0 || d != std::floor(d)) throw ScenarioError(field, "expected a non-negative integer");
    return static_cast<std::size_t>(d);
  };
  auto& p = sc.params;
  if (key == "beta_offset" || key == "beta-offset") {
    p.decision.beta_offset = number();
  } else if (key == "gamma") {
    p.decision.gamma = number();
  } else if (key == "window") {
    p.smoothing.window = count();
  } else if (key == "ewma_weight" || key == "ewma-weight") {
    p.smoothing.ewma_weight = number();
  } else if (key == "smoothing") {
    if (value == "window") {
      p.smoothing.mode = SmoothingMode::Window;
    } else if (value == "ewma") {
      p.smoothing.mode = SmoothingMode::Ewma;
    } else {
      throw ScenarioError(field, "expected 'window' or 'ewma'");
    }
  } else if (key == "q") {
    p.q = count();
  } else if (key == "max_paths" || key == "max-paths") {
    p.max_paths = count();
  } else if (key == "hello-interval" || key == "hello_interval") {
    p.hello_interval = number();
  } else if (key == "tc-interval" || key == "tc_interval") {
    p.tc_interval = number();
  } else if (key == "source_reserve" || key == "source-reserve") {
    p.source_reserve = number();
  } else if (key == "duration") {
    sc.duration = number();
  } else if (key == "traffic_stop" || key == "traffic-stop") {
    sc.traffic_stop = number();
  } else if (key == "mean_interarrival" || key == "mean-interarrival") {
    const double mean = number();
    for (auto& t : sc.traffic) t.mean_interarrival = mean;
  } else if (key == "policy") {
    try {
      p.decision.policy = parse_policy(value);
    } catch (const ScenarioError&) {
      throw ScenarioError(field, "unknown policy '" + value + "' (star, baseline-olsr)");
    }
  } else {
    throw ScenarioError(field, "unknown parameter");
  }
  validate(sc);
}

}  // namespace star
