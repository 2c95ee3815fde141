#include <gtest/gtest.h>

#include <thread>

#include "qres/qese.hpp"
#include "qres/secsla.hpp"
#include "support/test_util.hpp"

using namespace qres;
using namespace qres::qese;
using qres::test::code_of;

namespace {

// Provider serving on its own thread for the lifetime of the fixture.
struct Served {
  std::unique_ptr<net::RecordingChannel> provider_side;
  net::ChannelPtr broker_side;
  std::thread worker;
  ProviderSession session;

  Served(SymKey k, std::optional<MacKey> kv, std::uint64_t seed = 1) : session(k, kv) {
    auto [a, b] = net::make_channel_pair();
    provider_side = std::make_unique<net::RecordingChannel>(std::move(a));
    broker_side = std::move(b);
    broker_side->set_timeout(std::chrono::seconds(60));
    worker = std::thread([this, seed] {
      DeterministicRng rng(seed);
      session.serve(*provider_side, rng);
    });
  }
  ~Served() {
    broker_side->close();
    worker.join();
  }
};

}  // namespace

TEST(Qese, BeginKeywordFreshness) {
  DeterministicRng rng(1);
  ProviderSession p(keygen_sym(rng), std::nullopt);
  auto a = p.begin_keyword(QeseMode::Basic, rng);
  EXPECT_EQ(a.garbler_labels.size(), 128u);
  EXPECT_EQ(a.decoding.entries.size(), 128u);
  EXPECT_EQ(code_of([&] { p.begin_keyword(QeseMode::Basic, rng); }), ErrorCode::SessionInProgress);
  p.end_keyword();
  auto b = p.begin_keyword(QeseMode::Basic, rng);
  EXPECT_NE(a.gc.tables, b.gc.tables);
  EXPECT_NE(a.gc.session_id, b.gc.session_id);
  auto back = GarbledCircuitMsg::decode(b.encode());
  EXPECT_EQ(back.gc.tables, b.gc.tables);
  EXPECT_EQ(back.garbler_labels, b.garbler_labels);
}

TEST(Qese, SecondOtResponseIsRefused) {
  DeterministicRng rng(2);
  ProviderSession p(keygen_sym(rng), std::nullopt);
  p.begin_keyword(QeseMode::Basic, rng);
  auto sender = p.ot_setup(rng);
  std::vector<ot::ReceiverMsg> choice;
  for (auto& s : sender) choice.push_back(ot::receiver_choose(false, s, rng).second);
  auto raw = encode_ot_receiver(choice);
  p.ot_respond(raw);
  EXPECT_EQ(code_of([&] { p.ot_respond(raw); }), ErrorCode::EncodingConsumed);
}

TEST(Qese, BrokerObtainsEncryption) {
  DeterministicRng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    SymKey k = keygen_sym(rng);
    Served served(k, std::nullopt, 100 + trial);
    for (int j = 0; j < 2; ++j) {
      Token w = token_from_bytes(rng.bytes<8>());
      auto c = broker_run_keyword(*served.broker_side, j, {w, std::nullopt}, {}, rng);
      EXPECT_EQ(c, enc_token(k, w));
    }
  }
}

TEST(Qese, TranscriptsHoldNoSecrets) {
  DeterministicRng rng(4);
  SymKey k = keygen_sym(rng);
  Served served(k, std::nullopt);
  auto recorder = std::make_unique<net::RecordingChannel>(std::move(served.broker_side));
  auto* rec = recorder.get();
  served.broker_side = std::move(recorder);
  std::vector<Token> words;
  for (int i = 0; i < 5; ++i) {
    words.push_back(secsla::derive_token("level" + std::to_string(i) + "||" + std::to_string(i + 3)));
    broker_run_keyword(*served.broker_side, i, {words.back(), std::nullopt}, {}, rng);
  }
  Bytes provider_in = served.provider_side->received();
  for (const auto& w : words) EXPECT_FALSE(contains(provider_in, w.bytes));
  EXPECT_FALSE(contains(rec->received(), k.bytes));
  EXPECT_FALSE(contains(rec->sent(), k.bytes));
}

TEST(Qese, ValidatedModeAcceptsAndRejects) {
  DeterministicRng rng(5);
  SymKey k = keygen_sym(rng);
  MacKey kv = keygen_mac(rng);
  Served served(k, kv);
  BrokerOptions opt{QeseMode::Validated, 0};
  Token w = secsla::derive_token("level2||4");
  Tag tag = mac_tag(kv, w.bytes);
  EXPECT_EQ(broker_run_keyword(*served.broker_side, 0, {w, tag}, opt, rng), enc_token(k, w));
  Tag forged = tag;
  forged[31] ^= 1;
  EXPECT_EQ(code_of([&] { broker_run_keyword(*served.broker_side, 1, {w, forged}, opt, rng); }),
            ErrorCode::ValidationRejected);
  EXPECT_EQ(broker_run_keyword(*served.broker_side, 2, {w, tag}, opt, rng), enc_token(k, w));
}

TEST(Qese, ValidatedRequiresProviderKey) {
  DeterministicRng rng(6);
  Served served(keygen_sym(rng), std::nullopt);
  Token w = secsla::derive_token("x||1");
  Tag t{};
  EXPECT_EQ(code_of([&] { broker_run_keyword(*served.broker_side, 0, {w, t}, {QeseMode::Validated, 0}, rng); }),
            ErrorCode::ProtocolError);
  // the provider resets and keeps serving
  EXPECT_NO_THROW(broker_run_keyword(*served.broker_side, 1, {w, std::nullopt}, {}, rng));
}

TEST(Qese, CutAndChooseSession) {
  DeterministicRng rng(7);
  SymKey k = keygen_sym(rng);
  Served served(k, std::nullopt);
  Token w = secsla::derive_token("level4||9");
  EXPECT_EQ(broker_run_keyword(*served.broker_side, 0, {w, std::nullopt}, {QeseMode::Basic, 3}, rng), enc_token(k, w));
}

TEST(Qese, SearchIndex) {
  std::vector<EncryptedToken> list(150);
  for (std::size_t i = 0; i < list.size(); ++i) {
    list[i].bytes.fill(0);
    list[i].bytes[0] = static_cast<std::uint8_t>(i);
    list[i].bytes[1] = 0x55;
  }
  for (std::uint32_t i = 0; i < list.size(); ++i) EXPECT_EQ(search_index(list[i], list), i);
  EncryptedToken none{};
  EXPECT_FALSE(search_index(none, list).has_value());
}

TEST(Qese, MatchProviderAgainstPlainOracle) {
  DeterministicRng rng(8);
  SymKey k = keygen_sym(rng);
  std::vector<std::string> offer{"level1||3", "level2||4", "level3||5", "level4||6", "level1||7"};
  std::vector<std::string> want{"level1||3", "level3||4", "level3||5", "level1||6", "level1||7"};
  std::vector<EncryptedToken> tokens;
  for (const auto& s : offer) tokens.push_back(enc_token(k, secsla::derive_token(s)));
  std::vector<KeywordInput> kws;
  for (const auto& s : want) kws.push_back({secsla::derive_token(s), std::nullopt});

  Served served(k, std::nullopt);
  auto ml = qese_match_provider(*served.broker_side, kws, tokens, {}, rng);
  ASSERT_EQ(ml.index.size(), 5u);
  for (std::size_t i = 0; i < want.size(); ++i) {
    auto it = std::find(offer.begin(), offer.end(), want[i]);
    if (it == offer.end()) {
      EXPECT_FALSE(ml.index[i].has_value()) << i;
    } else {
      EXPECT_EQ(ml.index[i], static_cast<std::uint32_t>(it - offer.begin())) << i;
    }
  }
  int hits = 0;
  for (auto& x : ml.index) hits += x.has_value();
  EXPECT_EQ(hits, 3);
}

TEST(Qese, DroppedProviderSurfacesKeywordIndex) {
  DeterministicRng rng(9);
  SymKey k = keygen_sym(rng);
  auto [a, b] = net::make_channel_pair();
  net::FaultyChannel faulty(std::move(a), wire::FrameType::OtPayload, 2);
  ProviderSession p(k, std::nullopt);
  std::thread t([&] {
    DeterministicRng prng(1);
    p.serve(faulty, prng);
  });
  b->set_timeout(std::chrono::seconds(30));
  std::vector<KeywordInput> kws(3, {secsla::derive_token("a||1"), std::nullopt});
  std::vector<EncryptedToken> tokens(2);
  try {
    qese_match_provider(*b, kws, tokens, {}, rng);
    ADD_FAILURE() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ChannelClosed);
    EXPECT_NE(std::string(e.what()).find("keyword 1"), std::string::npos);
  }
  b->close();
  t.join();
}
