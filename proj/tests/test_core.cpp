#include <random>
#include <stdexcept>

#include "doctest.h"
#include "star/core.hpp"
#include "star/wire.hpp"

using namespace star;

TEST_CASE("eptt divides frame bits by rate") {
  CHECK(eptt(8192, 11'000'000) == doctest::Approx(7.447e-4).epsilon(1e-3));
  CHECK(eptt(8192, 1'000'000) == doctest::Approx(8.192e-3));
  CHECK(eptt(8192, 0) == kSaturated);
  CHECK(is_saturated(eptt(8192, 0)));
  CHECK_FALSE(is_saturated(eptt(8192, 1)));
}

TEST_CASE("storage ledger never goes negative or past capacity") {
  StorageLedger ledger(1000);
  CHECK(ledger.try_reserve(600));
  CHECK_FALSE(ledger.try_reserve(500));
  CHECK(ledger.used() == 600);
  CHECK(ledger.available() == 400);
  CHECK(ledger.available_ratio() == doctest::Approx(0.4));
  CHECK(ledger.advertise() == 400);
  ledger.release(600);
  CHECK(ledger.used() == 0);
  CHECK(ledger.advertised_available() == 400);
  CHECK_THROWS_AS(ledger.release(1), std::logic_error);
}

TEST_CASE("fragment sets") {
  FragmentSet s(4);
  s.set(0);
  s.set(2);
  CHECK(s.count() == 2);
  CHECK(s.complement().indices() == std::vector<std::size_t>{1, 3});
  s.fill(true);
  CHECK(s.all());
  CHECK(fragment_count(262144, 1024) == 256);
  CHECK(fragment_count(1, 1024) == 1);
  CHECK(fragment_count(1025, 1024) == 2);

  const auto t = make_tpdu(TpduId{NodeId(1), 3}, NodeId(1), NodeId(2), 1500, 1024, 0.0);
  CHECK(t.fragment_count() == 2);
  CHECK(t.fragment_bytes(0) == 1024);
  CHECK(t.fragment_bytes(1) == 476);
  CHECK_FALSE(t.complete());
}

namespace {

HelloMsg random_hello(std::mt19937_64& rng) {
  HelloMsg m;
  m.origin = NodeId(static_cast<std::uint32_t>(rng()));
  m.seq = rng();
  m.available_storage = rng();
  const auto n = rng() % 20;
  for (std::uint64_t i = 0; i < n; ++i) {
    m.neighbors.push_back(HelloNeighbor{NodeId(static_cast<std::uint32_t>(rng())), rng(), (rng() & 1) != 0});
  }
  return m;
}

TcMsg random_tc(std::mt19937_64& rng) {
  TcMsg m;
  m.origin = NodeId(static_cast<std::uint32_t>(rng()));
  m.seq = rng();
  m.available_storage = rng();
  const auto n = rng() % 40;
  for (std::uint64_t i = 0; i < n; ++i) {
    m.two_hop_info.push_back(
        TcEntry{NodeId(static_cast<std::uint32_t>(rng())), NodeId(static_cast<std::uint32_t>(rng())), rng(), rng()});
  }
  return m;
}

BatchAck random_ack(std::mt19937_64& rng) {
  BatchAck a;
  a.tpdu_id = TpduId{NodeId(static_cast<std::uint32_t>(rng())), static_cast<std::uint32_t>(rng())};
  a.available_storage = rng();
  a.bitmap = FragmentSet(rng() % 300);
  for (std::size_t i = 0; i < a.bitmap.size(); ++i) a.bitmap.set(i, (rng() & 1) != 0);
  return a;
}

}  // namespace

TEST_CASE("wire round trip") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    const auto h = random_hello(rng);
    const auto hb = wire::encode(h);
    CHECK(wire::peek_kind(hb) == wire::Kind::Hello);
    CHECK(wire::decode_hello(hb) == h);

    const auto t = random_tc(rng);
    CHECK(wire::decode_tc(wire::encode(t)) == t);

    const auto a = random_ack(rng);
    CHECK(wire::decode_batch_ack(wire::encode(a)) == a);
  }
}

TEST_CASE("wire layout and bit order") {
  BatchAck a;
  a.tpdu_id = TpduId{NodeId(1), 2};
  a.available_storage = 3;
  a.bitmap = FragmentSet(4);
  a.bitmap.set(1);
  a.bitmap.set(3);
  const auto bytes = wire::encode(a);
  // kind, length, src, counter, storage, bit count, one bitmap byte
  REQUIRE(bytes.size() == 1 + 4 + 4 + 4 + 8 + 4 + 1);
  CHECK(bytes[0] == 3);
  CHECK(bytes[1] == bytes.size() - 5);
  CHECK(bytes.back() == 0b1010);
}

TEST_CASE("wire rejects malformed input") {
  HelloMsg h;
  h.origin = NodeId(4);
  h.neighbors.push_back(HelloNeighbor{NodeId(5), 11'000'000, true});
  auto bytes = wire::encode(h);
  CHECK_THROWS_AS(wire::decode_tc(bytes), wire::DecodeError);
  auto shorter = bytes;
  shorter.pop_back();
  CHECK_THROWS_AS(wire::decode_hello(shorter), wire::DecodeError);
  auto longer = bytes;
  longer.push_back(0);
  CHECK_THROWS_AS(wire::decode_hello(longer), wire::DecodeError);
  CHECK_THROWS_AS(wire::decode_hello(std::vector<std::uint8_t>{1, 0}), wire::DecodeError);
}
