// Manhattan-grid mobility: nodes travel along horizontal and vertical
// streets, choosing left, right or straight at each intersection.
#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "star/core.hpp"
#include "star/sim/rng.hpp"

namespace star::sim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

double distance(Vec2 a, Vec2 b);

struct ManhattanSpec {
  double width = 500.0;
  double height = 500.0;
  double spacing = 100.0;  // street spacing, both axes
  double speed_min = 5.0;
  double speed_max = 10.0;
};

/// Straight-line motion of one node between two intersections.
struct Segment {
  Vec2 origin;
  Vec2 velocity;
  Seconds start = 0.0;
  Seconds end = 0.0;

  Vec2 at(Seconds t) const { return {origin.x + velocity.x * (t - start), origin.y + velocity.y * (t - start)}; }
};

class ManhattanMobility {
 public:
  ManhattanMobility(const ManhattanSpec& spec, std::size_t nodes, Rng rng);

  std::size_t size() const { return segments_.size(); }
  const Segment& segment(std::size_t node) const { return segments_[node]; }
  /// Position on the current segment, extrapolated past its end if asked.
  Vec2 position(std::size_t node, Seconds t) const { return segments_[node].at(t); }

  /// Earliest time any node reaches an intersection.
  Seconds next_turn() const;
  /// Starts a new segment for every node whose segment ends at or before t.
  std::vector<std::size_t> advance(Seconds t);

 private:
  void start_segment(std::size_t node, Vec2 at, int dx, int dy, Seconds t);
  void turn(std::size_t node, Seconds t);

  ManhattanSpec spec_;
  Rng rng_;
  std::vector<Segment> segments_;
  std::vector<std::pair<int, int>> heading_;
};

/// Times in (t0, t1] at which the distance between two linearly moving
/// points crosses `radius`, ascending.
std::vector<Seconds> range_crossings(const Segment& a, const Segment& b, Seconds t0, Seconds t1, double radius);

/// Undirected edges (u < v) whose endpoints are within `range` at time t.
std::set<std::pair<std::size_t, std::size_t>> adjacency_at(const ManhattanMobility& mobility, Seconds t, double range);

}  // namespace star::sim
