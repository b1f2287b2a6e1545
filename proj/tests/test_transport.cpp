#include <variant>

#include "doctest.h"
#include "star/transport.hpp"

using namespace star;

namespace {

Tpdu four_fragments() { return make_tpdu(TpduId{NodeId(1), 1}, NodeId(1), NodeId(2), 4096, 1024, 0.0); }

BatchAck ack_with(std::initializer_list<std::size_t> missing, std::size_t size = 4) {
  BatchAck a;
  a.tpdu_id = TpduId{NodeId(1), 1};
  a.bitmap = FragmentSet(size);
  for (const auto m : missing) a.bitmap.set(m);
  return a;
}

}  // namespace

TEST_CASE("fragmentation") {
  const auto gb = fragment(Bytes(1) << 30, 262144, 1024);
  CHECK(gb.size() == 4096);
  CHECK(gb.front() == TpduPlan{262144, 256});
  CHECK(gb.back() == TpduPlan{262144, 256});
  CHECK(fragment(262144, 262144, 1024) == std::vector<TpduPlan>{{262144, 256}});
  CHECK(fragment(1, 262144, 1024) == std::vector<TpduPlan>{{1, 1}});
  CHECK(fragment(512000, 262144, 1024) == std::vector<TpduPlan>{{262144, 256}, {249856, 244}});
  CHECK_THROWS(fragment(0, 262144, 1024));
  CHECK_THROWS(fragment(10, 512, 1024));
}

TEST_CASE("receiver bitmap") {
  ReceiveState r(four_fragments());
  r.receive(0);
  r.receive(2);
  CHECK(r.make_ack(0).bitmap.indices() == std::vector<std::size_t>{1, 3});

  SUBCASE("duplicates are idempotent") {
    const auto before = r.tpdu().fragments;
    r.receive(2);
    CHECK(r.tpdu().fragments == before);
  }
  SUBCASE("out of range indices are counted, not stored") {
    CHECK_FALSE(r.receive(4));
    CHECK(r.out_of_range() == 1);
  }
  SUBCASE("complete reception yields a zero bitmap") {
    r.receive(1);
    r.receive(3);
    CHECK(r.complete());
    const auto ack = r.make_ack(123);
    CHECK(ack.complete());
    CHECK(ack.available_storage == 123);
  }
}

TEST_CASE("sender session") {
  HopSession s(four_fragments(), NodeId(1), NodeId(2), 4);
  CHECK(s.outstanding().count() == 4);

  SUBCASE("zero bitmap completes") {
    CHECK(std::holds_alternative<Complete>(s.on_batch_ack(ack_with({}))));
    CHECK(s.closed());
    CHECK_THROWS(s.on_batch_ack(ack_with({})));
  }
  SUBCASE("flagged fragments are resent") {
    const auto out = s.on_batch_ack(ack_with({1, 3}));
    REQUIRE(std::holds_alternative<Retransmit>(out));
    CHECK(std::get<Retransmit>(out).fragments == std::vector<std::size_t>{1, 3});
    CHECK(s.outstanding().indices() == std::vector<std::size_t>{1, 3});
  }
  SUBCASE("fifth consecutive nonzero bitmap aborts") {
    for (int i = 0; i < 4; ++i) CHECK(std::holds_alternative<Retransmit>(s.on_batch_ack(ack_with({0, 1, 2, 3}))));
    CHECK(std::holds_alternative<Abort>(s.on_batch_ack(ack_with({0, 1, 2, 3}))));
    CHECK(s.closed());
  }
  SUBCASE("mismatched acks are rejected") {
    CHECK_THROWS(s.on_batch_ack(ack_with({}, 5)));
    auto other = ack_with({});
    other.tpdu_id.counter = 9;
    CHECK_THROWS(s.on_batch_ack(other));
  }
}

TEST_CASE("lossy exchange converges to a complete copy") {
  // Deterministic loss pattern: every third transmission of a fragment is lost.
  auto t = make_tpdu(TpduId{NodeId(3), 7}, NodeId(3), NodeId(4), 262144, 1024, 0.0);
  HopSession s(t, NodeId(3), NodeId(4), 8);
  ReceiveState r(t);
  std::size_t sent = 0;
  std::vector<std::size_t> batch = s.outstanding().indices();
  for (int round = 0; round < 9; ++round) {
    for (const auto k : batch) {
      if (++sent % 3 != 0) r.receive(k);
    }
    const auto out = s.on_batch_ack(r.make_ack(0));
    if (std::holds_alternative<Complete>(out)) break;
    REQUIRE(std::holds_alternative<Retransmit>(out));
    batch = std::get<Retransmit>(out).fragments;
  }
  CHECK(s.closed());
  CHECK(r.complete());
  CHECK(r.tpdu().id == t.id);
}
