// Seeded randomness with independent per-component substreams.
#pragma once

#include <cstdint>
#include <random>

namespace star::sim {

using Rng = std::mt19937_64;

enum class Stream : std::uint64_t {
  Placement = 1,
  LinkSchedule = 2,
  Traffic = 3,
  Mobility = 4,
  Channel = 5,
  Medium = 6,
  Phase = 7,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ index);
}

inline Rng make_rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
  return Rng(substream_seed(seed, stream, index));
}

}  // namespace star::sim
