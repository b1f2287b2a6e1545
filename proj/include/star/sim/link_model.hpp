// Abstract per-link channel: rate and availability over time, per-frame loss.
#pragma once

#include <vector>

#include "star/core.hpp"
#include "star/sim/rng.hpp"

namespace star::sim {

enum class LinkKind { Static, RateSwitch, OnOff };

struct LinkModelSpec {
  LinkKind kind = LinkKind::Static;
  BitsPerSecond rate = 11'000'000;  // Static and OnOff
  BitsPerSecond low = 1'000'000;    // RateSwitch
  BitsPerSecond high = 11'000'000;
  Seconds min_interval = 20.0;  // RateSwitch dwell, uniform
  Seconds max_interval = 50.0;
  Seconds on_duration = 200.0;  // OnOff
  Seconds off_duration = 40.0;
  Seconds phase = 0.0;  // first off period starts here
  double loss_rate = 0.0;
};

struct LinkState {
  bool on = true;
  BitsPerSecond rate = 0;  // nominal rate even while off
  double loss_rate = 0.0;
};

/// A realized schedule for one link over [0, horizon].
class LinkSchedule {
 public:
  LinkSchedule(const LinkModelSpec& spec, Seconds horizon, Rng& rng);

  LinkState at(Seconds t) const;
  /// Times at which rate or availability changes, ascending, within the horizon.
  std::vector<Seconds> change_times() const;
  const LinkModelSpec& spec() const { return spec_; }

 private:
  LinkModelSpec spec_;
  Seconds horizon_;
  bool starts_high_ = true;
  std::vector<Seconds> switches_;
};

struct FrameOutcome {
  bool delivered = false;
  Seconds duration = 0.0;  // air time, charged whether or not delivered
};

/// One frame on a link in the given state. Loss is drawn only while on.
FrameOutcome frame_transit(const LinkState& state, std::uint64_t frame_bits, Seconds per_frame_overhead, Rng& rng);

}  // namespace star::sim
