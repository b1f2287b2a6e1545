// Post-run performance metrics and their CSV forms.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "star/core.hpp"

namespace star {

/// Time spent on the air for one TPDU crossing one link, waits excluded.
struct HopRecord {
  Bytes bytes = 0;
  Seconds seconds = 0.0;
};

struct FileRecord {
  std::uint64_t id = 0;
  NodeId src;
  NodeId dst;
  Bytes size = 0;
  Seconds created_at = 0.0;
  std::optional<Seconds> delivered_at;
  std::vector<HopRecord> hops;
};

struct CdfPoint {
  Seconds delay = 0.0;
  std::size_t cumulative = 0;

  bool operator==(const CdfPoint&) const = default;
};

inline constexpr Seconds kFourMinutes = 240.0;

struct MetricsReport {
  Seconds duration = 0.0;
  std::size_t files_offered = 0;
  std::size_t files_delivered = 0;
  double delivery_fraction = 0.0;
  std::optional<Seconds> avg_file_delay;
  std::vector<CdfPoint> delay_cdf;
  double network_throughput = 0.0;  // bits per second
  std::optional<double> avg_streaming_throughput;
  double four_min_fraction = 0.0;
  std::size_t storage_overflow_drops = 0;
  std::map<NodeId, std::size_t> overflow_by_node;

  // Simulator audit counters.
  std::size_t tpdus_delivered = 0;
  std::size_t duplicate_deliveries = 0;
  std::size_t custody_violations = 0;
  std::size_t integrity_violations = 0;
  std::size_t hop_completions = 0;
  std::size_t hop_aborts = 0;
  std::size_t retransmission_rounds = 0;
};

/// Mean over hops of size * 8 / hop time. Absent when there are no hops.
std::optional<double> streaming_throughput(std::span<const HopRecord> hops);

/// Files delivered in strictly less than four minutes over files offered.
double four_minute_fraction(std::span<const Seconds> delays, std::size_t offered);

double network_throughput(double payload_bits, Seconds duration);

/// (delay, files delivered within that delay) steps, one per distinct delay.
std::vector<CdfPoint> delay_cdf(std::vector<Seconds> delays);

/// Fills every file-derived field; audit counters are left untouched.
void fill_file_metrics(MetricsReport& report, std::span<const FileRecord> files, Seconds duration);

/// Named scalar view used by every CSV writer. Absent values print empty.
std::vector<std::pair<std::string, std::optional<double>>> scalar_metrics(const MetricsReport& report);

void write_run_csv(std::ostream& out, const MetricsReport& report, std::uint64_t seed, const std::string& policy);
void write_cdf_csv(std::ostream& out, const MetricsReport& report);
void write_node_csv(std::ostream& out, const MetricsReport& report);

struct MetricSummary {
  std::string metric;
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> ci95;  // half-width, Student t
};

std::vector<MetricSummary> summarize(std::span<const MetricsReport> runs);
void write_aggregate_csv(std::ostream& out, std::span<const MetricsReport> runs);

/// Two-sided 95% Student t quantile.
double t_quantile_95(std::size_t degrees_of_freedom);

std::string format_number(double value);

}  // namespace star
