// Command-line front end shared by the `star` executable and the tests.
#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "star/metrics.hpp"
#include "star/scenario.hpp"

namespace star {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "1,2,5-8" -> {1, 2, 5, 6, 7, 8}. Throws ScenarioError naming --seeds.
std::vector<std::uint64_t> parse_seed_list(const std::string& text, const std::string& flag = "--seeds");

struct SeedRun {
  std::uint64_t seed = 0;
  MetricsReport report;
  std::string trace;  // JSON lines, empty unless requested
};

/// Runs every seed, fanning out over `jobs` worker threads. Results come
/// back in seed-list order.
std::vector<SeedRun> run_seeds(const Scenario& scenario, const std::vector<std::uint64_t>& seeds, bool trace,
                               unsigned jobs = 0);

/// Side-by-side means per metric with delta (star - baseline) and ratio.
void write_compare_csv(std::ostream& out, const std::vector<MetricsReport>& star,
                       const std::vector<MetricsReport>& baseline);
/// One row per seed pair and metric.
void write_paired_csv(std::ostream& out, const std::vector<SeedRun>& star, const std::vector<SeedRun>& baseline);

}  // namespace star
