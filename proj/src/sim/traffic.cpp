#include "star/sim/traffic.hpp"

#include <cmath>
#include <stdexcept>

namespace star::sim {

TrafficSource::TrafficSource(const TrafficSpec& spec, NodeId node, std::size_t node_count, Rng rng)
    : spec_(spec), node_(node), node_count_(node_count), rng_(std::move(rng)), last_(spec.start) {
  if (spec_.kind == TrafficKind::Bursty) {
    std::uniform_real_distribution<double> phase(0.0, spec_.burst + spec_.quiet);
    phase_ = phase(rng_);
  }
}

bool TrafficSource::active(Seconds t) const {
  if (spec_.kind != TrafficKind::Bursty) return true;
  const Seconds period = spec_.burst + spec_.quiet;
  const Seconds u = std::fmod(std::fmod(t - phase_, period) + period, period);
  return u < spec_.burst;
}

Seconds TrafficSource::next_burst_start(Seconds t) const {
  const Seconds period = spec_.burst + spec_.quiet;
  const double k = std::floor((t - phase_) / period) + 1.0;
  return phase_ + k * period;
}

Seconds TrafficSource::next_arrival() {
  switch (spec_.kind) {
    case TrafficKind::Constant:
      last_ += spec_.interval;
      break;
    case TrafficKind::Poisson: {
      std::exponential_distribution<double> gap(1.0 / spec_.mean_interarrival);
      last_ += gap(rng_);
      break;
    }
    case TrafficKind::Bursty: {
      // Memoryless: a draw that lands in a quiet period restarts at the next
      // burst.
      std::exponential_distribution<double> gap(1.0 / spec_.mean_interarrival);
      Seconds t = last_;
      if (!active(t)) t = next_burst_start(t);
      for (;;) {
        const Seconds candidate = t + gap(rng_);
        if (active(candidate)) {
          last_ = candidate;
          break;
        }
        t = next_burst_start(candidate - spec_.burst);
        if (t <= candidate) t = next_burst_start(candidate);
      }
      break;
    }
  }
  first_ = false;
  return last_;
}

NodeId TrafficSource::pick_destination() {
  if (spec_.dst) return *spec_.dst;
  if (node_count_ < 2) throw std::logic_error("no destination available");
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(node_count_ - 2));
  std::uint32_t d = pick(rng_);
  if (d >= node_.value) ++d;
  return NodeId(d);
}

}  // namespace star::sim
