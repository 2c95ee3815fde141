#include <gtest/gtest.h>

#include "qres/ot.hpp"
#include "support/test_util.hpp"

using namespace qres;
using namespace qres::ot;
using qres::test::code_of;

namespace {

garble::LabelPair random_pair(Rng& rng) {
  garble::LabelPair p;
  rng.fill(p.first.bytes);
  rng.fill(p.second.bytes);
  return p;
}

}  // namespace

TEST(Ot, ReceiverGetsChosenMessage) {
  DeterministicRng srng(1), rrng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto pair = random_pair(srng);
    bool b = trial & 1;
    auto [sst, smsg] = sender_setup(srng);
    auto [rst, rmsg] = receiver_choose(b, smsg, rrng);
    auto payload = sender_respond(sst, rmsg, pair.first, pair.second);
    EXPECT_EQ(receiver_finish(rst, payload), b ? pair.second : pair.first);
    EXPECT_FALSE(try_open(rst, payload, b ? 0 : 1).has_value());
  }
}

TEST(Ot, BatchAndLengthMismatch) {
  DeterministicRng srng(3), rrng(4);
  std::vector<garble::LabelPair> pairs;
  std::vector<std::uint8_t> bits;
  for (int i = 0; i < 64; ++i) {
    pairs.push_back(random_pair(srng));
    bits.push_back(static_cast<std::uint8_t>(srng.next_u64() & 1));
  }
  BatchTranscript t;
  auto got = ot_batch(bits, pairs, srng, rrng, &t);
  for (int i = 0; i < 64; ++i) EXPECT_EQ(got[i], bits[i] ? pairs[i].second : pairs[i].first);
  EXPECT_EQ(t.sender.size(), 64u);
  for (int i = 1; i < 64; ++i) EXPECT_NE(t.sender[i].A, t.sender[0].A);
  bits.pop_back();
  EXPECT_EQ(code_of([&] { ot_batch(bits, pairs, srng, rrng); }), ErrorCode::LengthMismatch);
}

TEST(Ot, InvalidElementsRejected) {
  DeterministicRng rng(5);
  SenderMsg bad;
  bad.A.bytes.fill(0xff);
  EXPECT_EQ(code_of([&] { receiver_choose(false, bad, rng); }), ErrorCode::InvalidGroupElement);
  EXPECT_EQ(code_of([&] { receiver_choose(false, SenderMsg{}, rng); }), ErrorCode::InvalidGroupElement);

  auto [sst, smsg] = sender_setup(rng);
  ReceiverMsg rbad;
  rbad.B.bytes.fill(0xff);
  garble::WireLabel m;
  EXPECT_EQ(code_of([&] { sender_respond(sst, rbad, m, m); }), ErrorCode::InvalidGroupElement);
  EXPECT_EQ(code_of([&] { sender_respond(sst, ReceiverMsg{smsg.A}, m, m); }),
            ErrorCode::InvalidGroupElement);
}

TEST(Ot, TamperedSlotFailsKeyCheck) {
  DeterministicRng rng(6);
  auto pair = random_pair(rng);
  auto [sst, smsg] = sender_setup(rng);
  auto [rst, rmsg] = receiver_choose(true, smsg, rng);
  auto payload = sender_respond(sst, rmsg, pair.first, pair.second);
  payload.slot[1][20] ^= 1;
  EXPECT_EQ(code_of([&] { receiver_finish(rst, payload); }), ErrorCode::OtFailure);
}
