#include "star/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace star {

std::string to_string(NodeId id) { return std::to_string(id.value); }

std::string to_string(const TpduId& id) {
  return to_string(id.src) + ":" + std::to_string(id.counter);
}

Seconds eptt(std::uint64_t size_bits, BitsPerSecond rate) {
  if (rate == 0) return kSaturated;
  return static_cast<double>(size_bits) / static_cast<double>(rate);
}

bool StorageLedger::try_reserve(Bytes amount) {
  if (amount > available()) return false;
  used_ += amount;
  return true;
}

void StorageLedger::release(Bytes amount) {
  if (amount > used_) throw std::logic_error("storage release exceeds used bytes");
  used_ -= amount;
}

void FragmentSet::fill(bool value) { std::fill(bits_.begin(), bits_.end(), value); }

std::size_t FragmentSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

FragmentSet FragmentSet::complement() const {
  FragmentSet out(size());
  for (std::size_t i = 0; i < size(); ++i) out.bits_[i] = !bits_[i];
  return out;
}

std::vector<std::size_t> FragmentSet::indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

std::size_t fragment_count(Bytes size, Bytes fragment_size) {
  if (fragment_size == 0) throw std::invalid_argument("fragment size must be positive");
  return static_cast<std::size_t>((size + fragment_size - 1) / fragment_size);
}

Bytes Tpdu::fragment_bytes(std::size_t index) const {
  const std::size_t n = fragment_count();
  if (index + 1 < n) return fragment_size;
  return size - fragment_size * (n - 1);
}

Tpdu make_tpdu(TpduId id, NodeId src, NodeId dst, Bytes size, Bytes fragment_size, Seconds created_at) {
  Tpdu t;
  t.id = id;
  t.src = src;
  t.dst = dst;
  t.size = size;
  t.fragment_size = fragment_size;
  t.created_at = created_at;
  t.fragments = FragmentSet(fragment_count(size, fragment_size));
  return t;
}

}  // namespace star
