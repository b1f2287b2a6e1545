// Time-ordered event queue with insertion-order tie breaking.
#pragma once

#include <cstdint>
#include <queue>
#include <stdexcept>
#include <vector>

#include "star/core.hpp"

namespace star::sim {

enum class EventKind { FrameArrival, Timer, LinkScheduleChange, TrafficArrival, MobilityStep, MetricSample };

template <class Payload>
class EventQueue {
 public:
  struct Event {
    Seconds time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::Timer;
    Payload payload{};
  };

  /// Rejects events in the past.
  std::uint64_t push(Seconds time, EventKind kind, Payload payload) {
    if (time < now_) throw std::logic_error("event scheduled in the past");
    const auto seq = next_seq_++;
    heap_.push(Event{time, seq, kind, std::move(payload)});
    return seq;
  }

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  Seconds now() const { return now_; }
  Seconds next_time() const { return heap_.top().time; }

  Event pop() {
    Event e = heap_.top();
    heap_.pop();
    now_ = e.time;
    return e;
  }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  Seconds now_ = 0.0;
  std::uint64_t next_seq_ = 0;
};

}  // namespace star::sim
