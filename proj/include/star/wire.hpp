// Binary encoding of control messages for trace logs.
//
// Every message is framed as
//   u8  kind        (1 = Hello, 2 = TC, 3 = BatchAck)
//   u32 body_length
//   body
// and all integers are little-endian with the fixed widths below.
//
//   Hello:    u32 origin, u64 seq, u64 available_storage, u32 count,
//             count x { u32 id, u64 rate_bps, u8 mpr }
//   TC:       u32 origin, u64 seq, u64 available_storage, u32 count,
//             count x { u32 from, u32 to, u64 rate_bps, u64 to_storage }
//   BatchAck: u32 tpdu_src, u32 tpdu_counter, u64 available_storage,
//             u32 bit_count, ceil(bit_count / 8) bitmap bytes
//
// Bitmap bit k is bit (k % 8) of byte (k / 8), least significant first.
#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "star/core.hpp"

namespace star::wire {

enum class Kind : std::uint8_t { Hello = 1, Tc = 2, BatchAck = 3 };

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode(const HelloMsg& msg);
std::vector<std::uint8_t> encode(const TcMsg& msg);
std::vector<std::uint8_t> encode(const BatchAck& ack);

Kind peek_kind(std::span<const std::uint8_t> bytes);

HelloMsg decode_hello(std::span<const std::uint8_t> bytes);
TcMsg decode_tc(std::span<const std::uint8_t> bytes);
BatchAck decode_batch_ack(std::span<const std::uint8_t> bytes);

}  // namespace star::wire
