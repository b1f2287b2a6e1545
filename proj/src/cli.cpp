#include "star/cli.hpp"

#include <atomic>
#include <mutex>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "star/sim/simulator.hpp"
#include "star/trace.hpp"

namespace star {

namespace fs = std::filesystem;

std::vector<std::uint64_t> parse_seed_list(const std::string& text, const std::string& flag) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  auto number = [&](const std::string& s) -> std::uint64_t {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      throw ScenarioError(flag, "expected a seed list like 1,2,5-8, got '" + text + "'");
    }
    return std::stoull(s);
  };
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      seeds.push_back(number(item));
      continue;
    }
    const auto lo = number(item.substr(0, dash));
    const auto hi = number(item.substr(dash + 1));
    if (hi < lo) throw ScenarioError(flag, "descending range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw ScenarioError(flag, "no seeds given");
  return seeds;
}

std::vector<SeedRun> run_seeds(const Scenario& scenario, const std::vector<std::uint64_t>& seeds, bool trace,
                               unsigned jobs) {
  std::vector<SeedRun> runs(seeds.size());
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(1, seeds.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        std::ostringstream buf;
        Trace sink(trace ? &buf : nullptr);
        runs[i].seed = seeds[i];
        runs[i].report = sim::run(scenario, seeds[i], &sink);
        runs[i].trace = buf.str();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return runs;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> ratio(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b || *b == 0.0) return std::nullopt;
  return *a / *b;
}

std::optional<double> delta(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

std::string policy_tag(Policy p) { return p == Policy::Star ? "star" : "baseline-olsr"; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

void write_runs(const fs::path& dir, const Scenario& sc, const std::vector<SeedRun>& runs, bool trace) {
  const auto stem = sc.name + "_" + policy_tag(sc.params.decision.policy);
  std::vector<MetricsReport> reports;
  for (const auto& r : runs) {
    const auto base = stem + "_seed" + std::to_string(r.seed);
    std::ostringstream run, cdf, nodes;
    write_run_csv(run, r.report, r.seed, policy_tag(sc.params.decision.policy));
    write_cdf_csv(cdf, r.report);
    write_node_csv(nodes, r.report);
    write_file(dir / (base + ".csv"), run.str());
    write_file(dir / (base + "_cdf.csv"), cdf.str());
    write_file(dir / (base + "_nodes.csv"), nodes.str());
    if (trace) write_file(dir / (base + "_trace.jsonl"), r.trace);
    reports.push_back(r.report);
  }
  std::ostringstream agg;
  write_aggregate_csv(agg, reports);
  write_file(dir / (stem + "_aggregate.csv"), agg.str());
}

void print_summary(std::ostream& out, const Scenario& sc, const std::vector<SeedRun>& runs) {
  std::vector<MetricsReport> reports;
  for (const auto& r : runs) reports.push_back(r.report);
  out << sc.name << " [" << policy_tag(sc.params.decision.policy) << "] " << runs.size() << " seed(s)\n";
  for (const auto& s : summarize(reports)) {
    if (s.metric == "files_offered" || s.metric == "files_delivered" || s.metric == "delivery_fraction" ||
        s.metric == "avg_file_delay" || s.metric == "network_throughput" || s.metric == "storage_overflow_drops") {
      out << "  " << s.metric << " = " << cell(s.mean);
      if (s.ci95) out << " +/- " << cell(s.ci95);
      out << '\n';
    }
  }
}

struct Common {
  std::string scenario;
  std::string seeds;
  std::string policy;
  std::string out = "results";
  std::string trace = "off";
  std::vector<std::string> params;
  unsigned jobs = 0;
};

Scenario prepare(const Common& c) {
  Scenario sc = load_scenario(c.scenario);
  for (const auto& kv : c.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw ScenarioError("--param", "expected key=value, got '" + kv + "'");
    apply_param(sc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!c.policy.empty()) {
    try {
      sc.params.decision.policy = parse_policy(c.policy);
    } catch (const ScenarioError&) {
      throw ScenarioError("--policy", "unknown policy '" + c.policy + "' (star, baseline-olsr)");
    }
  }
  return sc;
}

std::vector<std::uint64_t> seeds_for(const Scenario& sc, const std::string& flag_value, const std::string& flag) {
  if (!flag_value.empty()) return parse_seed_list(flag_value, flag);
  if (!sc.seeds.empty()) return sc.seeds;
  return {1};
}

bool trace_on(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ScenarioError("--trace", "expected on or off");
}

void add_common(CLI::App* cmd, Common& c, bool with_policy) {
  cmd->add_option("scenario", c.scenario, "Scenario file or preset:<name>")->required();
  cmd->add_option("--seeds", c.seeds, "Seed list, e.g. 1-10 or 1,4,7");
  if (with_policy) cmd->add_option("--policy", c.policy, "star or baseline-olsr (overrides the scenario)");
  cmd->add_option("--out", c.out, "Output directory");
  cmd->add_option("--trace", c.trace, "on/off: write JSON-lines traces");
  cmd->add_option("--param", c.params, "Override key=value (beta_offset, gamma, window, q, hello-interval, ...)");
  cmd->add_option("-j,--jobs", c.jobs, "Worker threads (default: hardware concurrency)");
}

}  // namespace

void write_compare_csv(std::ostream& out, const std::vector<MetricsReport>& star,
                       const std::vector<MetricsReport>& baseline) {
  const auto a = summarize(star);
  const auto b = summarize(baseline);
  out << "metric,star,baseline,delta,ratio\n";
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    out << a[i].metric << ',' << cell(a[i].mean) << ',' << cell(b[i].mean) << ',' << cell(delta(a[i].mean, b[i].mean))
        << ',' << cell(ratio(a[i].mean, b[i].mean)) << '\n';
  }
}

void write_paired_csv(std::ostream& out, const std::vector<SeedRun>& star, const std::vector<SeedRun>& baseline) {
  out << "star_seed,baseline_seed,metric,star,baseline,delta,ratio\n";
  for (std::size_t i = 0; i < star.size() && i < baseline.size(); ++i) {
    const auto a = scalar_metrics(star[i].report);
    const auto b = scalar_metrics(baseline[i].report);
    for (std::size_t k = 0; k < a.size(); ++k) {
      out << star[i].seed << ',' << baseline[i].seed << ',' << a[k].first << ',' << cell(a[k].second) << ','
          << cell(b[k].second) << ',' << cell(delta(a[k].second, b[k].second)) << ','
          << cell(ratio(a[k].second, b[k].second)) << '\n';
    }
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"STAR storage-aware routing simulator", "star"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario for each seed");
  add_common(run_cmd, run_opts, true);

  Common cmp_opts;
  std::string baseline_seeds;
  auto* cmp_cmd = app.add_subcommand("compare", "Run STAR and the OLSR baseline on paired seeds");
  add_common(cmp_cmd, cmp_opts, false);
  cmp_cmd->add_option("--baseline-seeds", baseline_seeds, "Seed list for the baseline (default: same as --seeds)");

  std::string validate_ref;
  std::vector<std::string> validate_params;
  auto* val_cmd = app.add_subcommand("validate", "Parse and check a scenario without running it");
  val_cmd->add_option("scenario", validate_ref, "Scenario file or preset:<name>")->required();
  val_cmd->add_option("--param", validate_params, "Override key=value");

  auto* presets_cmd = app.add_subcommand("presets", "List bundled scenarios");
  std::string export_name;
  auto* export_cmd = app.add_subcommand("export", "Print a bundled scenario as JSON");
  export_cmd->add_option("preset", export_name, "Preset name")->required();

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*presets_cmd) {
      for (const auto& name : preset_names()) out << name << '\n';
      return kExitOk;
    }
    if (*export_cmd) {
      const auto text = preset_text(export_name);
      if (!text) throw ScenarioError("preset", "unknown preset '" + export_name + "'");
      out << *text << '\n';
      return kExitOk;
    }
    if (*val_cmd) {
      Common c;
      c.scenario = validate_ref;
      c.params = validate_params;
      const auto sc = prepare(c);
      for (const auto& w : validate(sc)) err << "warning: " << w << '\n';
      out << sc.name << ": ok\n";
      return kExitOk;
    }
    if (*run_cmd) {
      const auto sc = prepare(run_opts);
      const bool trace = trace_on(run_opts.trace);
      const auto seeds = seeds_for(sc, run_opts.seeds, "--seeds");
      for (const auto& w : validate(sc)) err << "warning: " << w << '\n';
      const auto runs = run_seeds(sc, seeds, trace, run_opts.jobs);
      fs::create_directories(run_opts.out);
      write_runs(run_opts.out, sc, runs, trace);
      print_summary(out, sc, runs);
      return kExitOk;
    }
    if (*cmp_cmd) {
      Scenario star_sc = prepare(cmp_opts);
      const bool trace = trace_on(cmp_opts.trace);
      const auto seeds = seeds_for(star_sc, cmp_opts.seeds, "--seeds");
      const auto other = baseline_seeds.empty() ? seeds : parse_seed_list(baseline_seeds, "--baseline-seeds");
      if (other.size() != seeds.size()) {
        throw ScenarioError("--baseline-seeds", "needs as many seeds as --seeds (" + std::to_string(seeds.size()) +
                                                    " vs " + std::to_string(other.size()) + ")");
      }
      for (const auto& w : validate(star_sc)) err << "warning: " << w << '\n';
      Scenario base_sc = star_sc;
      star_sc.params.decision.policy = Policy::Star;
      base_sc.params.decision.policy = Policy::BaselineOlsr;
      const auto star_runs = run_seeds(star_sc, seeds, trace, cmp_opts.jobs);
      const auto base_runs = run_seeds(base_sc, other, trace, cmp_opts.jobs);
      fs::create_directories(cmp_opts.out);
      write_runs(cmp_opts.out, star_sc, star_runs, trace);
      write_runs(cmp_opts.out, base_sc, base_runs, trace);
      std::vector<MetricsReport> a, b;
      for (const auto& r : star_runs) a.push_back(r.report);
      for (const auto& r : base_runs) b.push_back(r.report);
      std::ostringstream cmp, paired;
      write_compare_csv(cmp, a, b);
      write_paired_csv(paired, star_runs, base_runs);
      write_file(fs::path(cmp_opts.out) / (star_sc.name + "_compare.csv"), cmp.str());
      write_file(fs::path(cmp_opts.out) / (star_sc.name + "_paired.csv"), paired.str());
      print_summary(out, star_sc, star_runs);
      print_summary(out, base_sc, base_runs);
      return kExitOk;
    }
  } catch (const ScenarioError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}

}  // namespace star
