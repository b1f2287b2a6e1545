#include "star/wire.hpp"

namespace star::wire {
namespace {

class Writer {
 public:
  explicit Writer(Kind kind) {
    out_.push_back(static_cast<std::uint8_t>(kind));
    put_u32(0);  // patched in finish()
  }

  void put_u8(std::uint8_t v) { out_.push_back(v); }
  void put_u32(std::uint32_t v) { put_le(v, 4); }
  void put_u64(std::uint64_t v) { put_le(v, 8); }

  std::vector<std::uint8_t> finish() {
    const auto body = static_cast<std::uint32_t>(out_.size() - 5);
    for (int i = 0; i < 4; ++i) out_[1 + i] = static_cast<std::uint8_t>(body >> (8 * i));
    return std::move(out_);
  }

 private:
  void put_le(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> bytes, Kind expected) : bytes_(bytes) {
    if (bytes_.size() < 5) throw DecodeError("truncated frame header");
    if (bytes_[0] != static_cast<std::uint8_t>(expected)) throw DecodeError("unexpected message kind");
    pos_ = 1;
    const auto body = get_u32();
    if (bytes_.size() != 5 + static_cast<std::size_t>(body)) throw DecodeError("body length mismatch");
  }

  std::uint8_t get_u8() { return static_cast<std::uint8_t>(get_le(1)); }
  std::uint32_t get_u32() { return static_cast<std::uint32_t>(get_le(4)); }
  std::uint64_t get_u64() { return get_le(8); }

  void expect_end() const {
    if (pos_ != bytes_.size()) throw DecodeError("trailing bytes");
  }

 private:
  std::uint64_t get_le(int width) {
    if (pos_ + static_cast<std::size_t>(width) > bytes_.size()) throw DecodeError("truncated field");
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode(const HelloMsg& msg) {
  Writer w(Kind::Hello);
  w.put_u32(msg.origin.value);
  w.put_u64(msg.seq);
  w.put_u64(msg.available_storage);
  w.put_u32(static_cast<std::uint32_t>(msg.neighbors.size()));
  for (const auto& n : msg.neighbors) {
    w.put_u32(n.id.value);
    w.put_u64(n.rate);
    w.put_u8(n.mpr ? 1 : 0);
  }
  return w.finish();
}

std::vector<std::uint8_t> encode(const TcMsg& msg) {
  Writer w(Kind::Tc);
  w.put_u32(msg.origin.value);
  w.put_u64(msg.seq);
  w.put_u64(msg.available_storage);
  w.put_u32(static_cast<std::uint32_t>(msg.two_hop_info.size()));
  for (const auto& e : msg.two_hop_info) {
    w.put_u32(e.from.value);
    w.put_u32(e.to.value);
    w.put_u64(e.rate);
    w.put_u64(e.to_storage);
  }
  return w.finish();
}

std::vector<std::uint8_t> encode(const BatchAck& ack) {
  Writer w(Kind::BatchAck);
  w.put_u32(ack.tpdu_id.src.value);
  w.put_u32(ack.tpdu_id.counter);
  w.put_u64(ack.available_storage);
  const auto bits = ack.bitmap.size();
  w.put_u32(static_cast<std::uint32_t>(bits));
  for (std::size_t byte = 0; byte < (bits + 7) / 8; ++byte) {
    std::uint8_t v = 0;
    for (std::size_t b = 0; b < 8; ++b) {
      const auto k = byte * 8 + b;
      if (k < bits && ack.bitmap.test(k)) v |= static_cast<std::uint8_t>(1u << b);
    }
    w.put_u8(v);
  }
  return w.finish();
}

Kind peek_kind(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw DecodeError("empty frame");
  const auto k = bytes[0];
  if (k < 1 || k > 3) throw DecodeError("unknown message kind");
  return static_cast<Kind>(k);
}

HelloMsg decode_hello(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Kind::Hello);
  HelloMsg msg;
  msg.origin = NodeId(r.get_u32());
  msg.seq = r.get_u64();
  msg.available_storage = r.get_u64();
  const auto n = r.get_u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    HelloNeighbor nb;
    nb.id = NodeId(r.get_u32());
    nb.rate = r.get_u64();
    const auto flag = r.get_u8();
    if (flag > 1) throw DecodeError("bad mpr flag");
    nb.mpr = flag == 1;
    msg.neighbors.push_back(nb);
  }
  r.expect_end();
  return msg;
}

TcMsg decode_tc(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Kind::Tc);
  TcMsg msg;
  msg.origin = NodeId(r.get_u32());
  msg.seq = r.get_u64();
  msg.available_storage = r.get_u64();
  const auto n = r.get_u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    TcEntry e;
    e.from = NodeId(r.get_u32());
    e.to = NodeId(r.get_u32());
    e.rate = r.get_u64();
    e.to_storage = r.get_u64();
    msg.two_hop_info.push_back(e);
  }
  r.expect_end();
  return msg;
}

BatchAck decode_batch_ack(std::span<const std::uint8_t> bytes) {
  Reader r(bytes, Kind::BatchAck);
  BatchAck ack;
  ack.tpdu_id.src = NodeId(r.get_u32());
  ack.tpdu_id.counter = r.get_u32();
  ack.available_storage = r.get_u64();
  const auto bits = r.get_u32();
  ack.bitmap = FragmentSet(bits);
  for (std::size_t byte = 0; byte < (static_cast<std::size_t>(bits) + 7) / 8; ++byte) {
    const auto v = r.get_u8();
    for (std::size_t b = 0; b < 8; ++b) {
      const auto k = byte * 8 + b;
      const bool set = (v >> b) & 1u;
      if (k < bits) {
        ack.bitmap.set(k, set);
      } else if (set) {
        throw DecodeError("padding bits set");
      }
    }
  }
  r.expect_end();
  return ack;
}

}  // namespace star::wire
