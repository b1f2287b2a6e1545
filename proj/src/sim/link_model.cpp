#include "star/sim/link_model.hpp"

#include <algorithm>
#include <cmath>

namespace star::sim {

LinkSchedule::LinkSchedule(const LinkModelSpec& spec, Seconds horizon, Rng& rng) : spec_(spec), horizon_(horizon) {
  if (spec_.kind != LinkKind::RateSwitch) return;
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> dwell(spec_.min_interval, spec_.max_interval);
  starts_high_ = coin(rng);
  for (Seconds t = dwell(rng); t < horizon_; t += dwell(rng)) switches_.push_back(t);
}

LinkState LinkSchedule::at(Seconds t) const {
  LinkState s;
  s.loss_rate = spec_.loss_rate;
  switch (spec_.kind) {
    case LinkKind::Static:
      s.rate = spec_.rate;
      break;
    case LinkKind::RateSwitch: {
      const auto flips = std::upper_bound(switches_.begin(), switches_.end(), t) - switches_.begin();
      const bool high = starts_high_ == (flips % 2 == 0);
      s.rate = high ? spec_.high : spec_.low;
      break;
    }
    case LinkKind::OnOff: {
      s.rate = spec_.rate;
      const Seconds period = spec_.on_duration + spec_.off_duration;
      if (spec_.off_duration > 0.0 && period > 0.0) {
        const Seconds u = std::fmod(std::fmod(t - spec_.phase, period) + period, period);
        s.on = u >= spec_.off_duration;
      }
      break;
    }
  }
  return s;
}

std::vector<Seconds> LinkSchedule::change_times() const {
  if (spec_.kind == LinkKind::RateSwitch) return switches_;
  std::vector<Seconds> out;
  if (spec_.kind != LinkKind::OnOff || spec_.off_duration <= 0.0) return out;
  const Seconds period = spec_.on_duration + spec_.off_duration;
  const double first_cycle = std::floor((0.0 - spec_.phase) / period);
  for (double k = first_cycle;; k += 1.0) {
    const Seconds off_start = spec_.phase + k * period;
    if (off_start > horizon_) break;
    if (off_start > 0.0) out.push_back(off_start);
    const Seconds on_start = off_start + spec_.off_duration;
    if (on_start > 0.0 && on_start <= horizon_) out.push_back(on_start);
  }
  return out;
}

FrameOutcome frame_transit(const LinkState& state, std::uint64_t frame_bits, Seconds per_frame_overhead, Rng& rng) {
  FrameOutcome out;
  const BitsPerSecond rate = state.rate == 0 ? 1 : state.rate;
  out.duration = static_cast<double>(frame_bits) / static_cast<double>(rate) + per_frame_overhead;
  if (!state.on) return out;
  if (state.loss_rate > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    out.delivered = u(rng) >= state.loss_rate;
  } else {
    out.delivered = true;
  }
  return out;
}

}  // namespace star::sim
