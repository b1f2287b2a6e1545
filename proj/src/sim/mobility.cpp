#include "star/sim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace star::sim {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

namespace {
constexpr double kSnap = 1e-6;

double snap(double v, double spacing) { return std::round(v / spacing) * spacing; }
}  // namespace

ManhattanMobility::ManhattanMobility(const ManhattanSpec& spec, std::size_t nodes, Rng rng)
    : spec_(spec), rng_(std::move(rng)), segments_(nodes), heading_(nodes) {
  const int cols = static_cast<int>(std::floor(spec_.width / spec_.spacing + kSnap));
  const int rows = static_cast<int>(std::floor(spec_.height / spec_.spacing + kSnap));
  std::uniform_int_distribution<int> col(0, cols);
  std::uniform_int_distribution<int> row(0, rows);
  std::uniform_int_distribution<int> dir(0, 3);
  for (std::size_t n = 0; n < nodes; ++n) {
    const Vec2 at{col(rng_) * spec_.spacing, row(rng_) * spec_.spacing};
    // Pick a heading that stays inside the grid.
    for (;;) {
      static constexpr std::pair<int, int> kDirs[] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
      const auto [dx, dy] = kDirs[dir(rng_)];
      const double nx = at.x + dx * spec_.spacing;
      const double ny = at.y + dy * spec_.spacing;
      if (nx < -kSnap || ny < -kSnap || nx > spec_.width + kSnap || ny > spec_.height + kSnap) continue;
      start_segment(n, at, dx, dy, 0.0);
      break;
    }
  }
}

void ManhattanMobility::start_segment(std::size_t node, Vec2 at, int dx, int dy, Seconds t) {
  std::uniform_real_distribution<double> speed(spec_.speed_min, spec_.speed_max);
  const double v = speed(rng_);
  auto& seg = segments_[node];
  seg.origin = at;
  seg.velocity = {dx * v, dy * v};
  seg.start = t;
  seg.end = t + spec_.spacing / v;
  heading_[node] = {dx, dy};
}

void ManhattanMobility::turn(std::size_t node, Seconds t) {
  const auto& seg = segments_[node];
  Vec2 at = seg.at(seg.end);
  at = {snap(at.x, spec_.spacing), snap(at.y, spec_.spacing)};
  const auto [dx, dy] = heading_[node];
  // straight, left, right
  const std::pair<int, int> options[] = {{dx, dy}, {-dy, dx}, {dy, -dx}};
  std::vector<std::pair<int, int>> valid;
  for (const auto& [ox, oy] : options) {
    const double nx = at.x + ox * spec_.spacing;
    const double ny = at.y + oy * spec_.spacing;
    if (nx >= -kSnap && ny >= -kSnap && nx <= spec_.width + kSnap && ny <= spec_.height + kSnap) {
      valid.emplace_back(ox, oy);
    }
  }
  if (valid.empty()) valid.emplace_back(-dx, -dy);
  std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
  const auto [nx, ny] = valid[pick(rng_)];
  start_segment(node, at, nx, ny, t);
}

Seconds ManhattanMobility::next_turn() const {
  Seconds t = std::numeric_limits<Seconds>::infinity();
  for (const auto& s : segments_) t = std::min(t, s.end);
  return t;
}

std::vector<std::size_t> ManhattanMobility::advance(Seconds t) {
  std::vector<std::size_t> turned;
  for (std::size_t n = 0; n < segments_.size(); ++n) {
    if (segments_[n].end <= t) {
      turn(n, segments_[n].end);
      turned.push_back(n);
    }
  }
  return turned;
}

std::vector<Seconds> range_crossings(const Segment& a, const Segment& b, Seconds t0, Seconds t1, double radius) {
  // Relative position r(t) = r0 + w (t - t0); solve |r|^2 = radius^2.
  const Vec2 pa = a.at(t0);
  const Vec2 pb = b.at(t0);
  const double rx = pa.x - pb.x;
  const double ry = pa.y - pb.y;
  const double wx = a.velocity.x - b.velocity.x;
  const double wy = a.velocity.y - b.velocity.y;
  const double qa = wx * wx + wy * wy;
  const double qb = 2.0 * (rx * wx + ry * wy);
  const double qc = rx * rx + ry * ry - radius * radius;
  std::vector<Seconds> out;
  if (qa == 0.0) return out;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc <= 0.0) return out;  // tangent contact does not change adjacency
  const double sq = std::sqrt(disc);
  for (const double root : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
    const Seconds t = t0 + root;
    if (t > t0 && t <= t1) out.push_back(t);
  }
  return out;
}

std::set<std::pair<std::size_t, std::size_t>> adjacency_at(const ManhattanMobility& mobility, Seconds t, double range) {
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < mobility.size(); ++u) {
    for (std::size_t v = u + 1; v < mobility.size(); ++v) {
      if (distance(mobility.position(u, t), mobility.position(v, t)) <= range) edges.emplace(u, v);
    }
  }
  return edges;
}

}  // namespace star::sim
