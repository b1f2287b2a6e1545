#include "star/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace star {

std::optional<double> streaming_throughput(std::span<const HopRecord> hops) {
  if (hops.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& h : hops) {
    if (h.seconds <= 0.0) throw std::invalid_argument("hop time must be positive");
    sum += static_cast<double>(h.bytes) * 8.0 / h.seconds;
  }
  return sum / static_cast<double>(hops.size());
}

double four_minute_fraction(std::span<const Seconds> delays, std::size_t offered) {
  if (offered == 0) return 0.0;
  const auto fast = std::count_if(delays.begin(), delays.end(), [](Seconds d) { return d < kFourMinutes; });
  return static_cast<double>(fast) / static_cast<double>(offered);
}

double network_throughput(double payload_bits, Seconds duration) {
  if (duration <= 0.0) throw std::invalid_argument("duration must be positive");
  return payload_bits / duration;
}

std::vector<CdfPoint> delay_cdf(std::vector<Seconds> delays) {
  std::sort(delays.begin(), delays.end());
  std::vector<CdfPoint> out;
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!out.empty() && out.back().delay == delays[i]) {
      out.back().cumulative = i + 1;
    } else {
      out.push_back(CdfPoint{delays[i], i + 1});
    }
  }
  return out;
}

void fill_file_metrics(MetricsReport& report, std::span<const FileRecord> files, Seconds duration) {
  report.duration = duration;
  report.files_offered = files.size();
  std::vector<Seconds> delays;
  std::vector<double> streaming;
  double delivered_bits = 0.0;
  for (const auto& f : files) {
    if (!f.delivered_at) continue;
    delays.push_back(*f.delivered_at - f.created_at);
    delivered_bits += static_cast<double>(f.size) * 8.0;
    if (const auto s = streaming_throughput(f.hops)) streaming.push_back(*s);
  }
  report.files_delivered = delays.size();
  report.delivery_fraction =
      report.files_offered == 0 ? 0.0 : static_cast<double>(report.files_delivered) / report.files_offered;
  report.avg_file_delay.reset();
  if (!delays.empty()) {
    report.avg_file_delay = std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());
  }
  report.avg_streaming_throughput.reset();
  if (!streaming.empty()) {
    report.avg_streaming_throughput =
        std::accumulate(streaming.begin(), streaming.end(), 0.0) / static_cast<double>(streaming.size());
  }
  report.four_min_fraction = four_minute_fraction(delays, report.files_offered);
  report.network_throughput = network_throughput(delivered_bits, duration);
  report.delay_cdf = delay_cdf(std::move(delays));
}

std::string format_number(double value) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.10g", value);
  return buf.data();
}

std::vector<std::pair<std::string, std::optional<double>>> scalar_metrics(const MetricsReport& r) {
  auto d = [](std::size_t v) { return std::optional<double>(static_cast<double>(v)); };
  return {
      {"files_offered", d(r.files_offered)},
      {"files_delivered", d(r.files_delivered)},
      {"delivery_fraction", r.delivery_fraction},
      {"avg_file_delay", r.avg_file_delay},
      {"network_throughput", r.network_throughput},
      {"avg_streaming_throughput", r.avg_streaming_throughput},
      {"four_min_fraction", r.four_min_fraction},
      {"storage_overflow_drops", d(r.storage_overflow_drops)},
      {"tpdus_delivered", d(r.tpdus_delivered)},
      {"duplicate_deliveries", d(r.duplicate_deliveries)},
      {"custody_violations", d(r.custody_violations)},
      {"integrity_violations", d(r.integrity_violations)},
      {"hop_completions", d(r.hop_completions)},
      {"hop_aborts", d(r.hop_aborts)},
      {"retransmission_rounds", d(r.retransmission_rounds)},
  };
}

namespace {
std::string cell(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }
}  // namespace

void write_run_csv(std::ostream& out, const MetricsReport& report, std::uint64_t seed, const std::string& policy) {
  const auto metrics = scalar_metrics(report);
  out << "seed,policy";
  for (const auto& [name, value] : metrics) out << ',' << name;
  out << '\n' << seed << ',' << policy;
  for (const auto& [name, value] : metrics) out << ',' << cell(value);
  out << '\n';
}

void write_cdf_csv(std::ostream& out, const MetricsReport& report) {
  out << "delay,files_delivered\n";
  for (const auto& p : report.delay_cdf) out << format_number(p.delay) << ',' << p.cumulative << '\n';
}

void write_node_csv(std::ostream& out, const MetricsReport& report) {
  out << "node,storage_overflow_drops\n";
  for (const auto& [node, drops] : report.overflow_by_node) out << node.value << ',' << drops << '\n';
}

double t_quantile_95(std::size_t df) {
  static constexpr std::array<double, 30> table = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228, 2.201, 2.179, 2.160, 2.145, 2.131,
      2.120,  2.110, 2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df == 0) throw std::invalid_argument("need at least one degree of freedom");
  if (df <= table.size()) return table[df - 1];
  if (df <= 40) return 2.021;
  if (df <= 60) return 2.000;
  if (df <= 120) return 1.980;
  return 1.960;
}

std::vector<MetricSummary> summarize(std::span<const MetricsReport> runs) {
  std::vector<MetricSummary> out;
  if (runs.empty()) return out;
  const auto names = scalar_metrics(runs.front());
  for (std::size_t m = 0; m < names.size(); ++m) {
    std::vector<double> values;
    for (const auto& r : runs) {
      if (const auto v = scalar_metrics(r)[m].second) values.push_back(*v);
    }
    MetricSummary s;
    s.metric = names[m].first;
    s.n = values.size();
    if (!values.empty()) {
      const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
      s.mean = mean;
      if (values.size() > 1) {
        double ss = 0.0;
        for (const auto v : values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        s.ci95 = t_quantile_95(values.size() - 1) * sd / std::sqrt(static_cast<double>(values.size()));
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_aggregate_csv(std::ostream& out, std::span<const MetricsReport> runs) {
  out << "metric,n,mean,ci95\n";
  for (const auto& s : summarize(runs)) {
    out << s.metric << ',' << s.n << ',' << cell(s.mean) << ',' << cell(s.ci95) << '\n';
  }
}

}  // namespace star
