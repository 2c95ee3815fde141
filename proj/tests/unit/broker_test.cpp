#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qres/deployment.hpp"
#include "qres/rng.hpp"
#include "qres/scenario.hpp"
#include "support/plain_oracle.hpp"
#include "support/test_util.hpp"

using namespace qres;
using qres::test::code_of;
using qres::test::TempDir;

namespace {

broker::StoredSecSla random_record(Rng& rng, std::size_t n = 5) {
  broker::StoredSecSla r;
  r.list.auth.nonce = make_nonce(rng);
  rng.fill(r.list.auth.challenge);
  r.list.attach_key = sig_keygen(rng).pk;
  r.list.tokens.resize(n);
  for (auto& t : r.list.tokens) rng.fill(t.bytes);
  rng.fill(r.list.auditor_sig.bytes);
  r.anonymous_id = r.list.auth.anon_id();
  r.submitted_at = 1700000000 + static_cast<std::int64_t>(rng.uniform(1000));
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

secsla::SecSlaDocument offering_with(const secsla::SecSlaDocument& tmpl, const std::vector<std::string>& values) {
  auto doc = tmpl;
  std::size_t i = 0;
  std::function<void(std::vector<secsla::Node>&)> walk = [&](std::vector<secsla::Node>& nodes) {
    for (auto& n : nodes) {
      if (n.kind == secsla::NodeKind::Slo) n.value = values.at(i++);
      walk(n.children);
    }
  };
  walk(doc.services);
  return doc;
}

}  // namespace

TEST(Wire, EveryFrameTypeRoundTrips) {
  DeterministicRng rng(1);
  int known = 0;
  for (int t = 0; t < 256; ++t) {
    if (!wire::is_known_type(static_cast<std::uint8_t>(t))) continue;
    ++known;
    for (std::size_t len : {0ul, 1ul, 300ul}) {
      wire::Frame f{static_cast<wire::FrameType>(t), Bytes(len)};
      rng.fill(f.payload);
      EXPECT_EQ(wire::frame_decode(wire::frame_encode(f)), f);
    }
  }
  EXPECT_EQ(known, 25);
}

TEST(Wire, DecodeErrors) {
  EXPECT_EQ(code_of([] { wire::frame_decode(Bytes{0, 0, 2}); }), ErrorCode::Truncated);
  auto good = wire::frame_encode({wire::FrameType::RegisterAck, Bytes{1, 2, 3}});
  auto longer = good;
  longer.push_back(0);
  EXPECT_EQ(code_of([&] { wire::frame_decode(longer); }), ErrorCode::Truncated);
  EXPECT_EQ(code_of([&] { wire::frame_decode(ByteView(good).first(good.size() - 1)); }), ErrorCode::Truncated);
  auto unknown = good;
  unknown[4] = 0xFF;
  EXPECT_EQ(code_of([&] { wire::frame_decode(unknown); }), ErrorCode::UnknownType);
  auto version = good;
  version[5] = 2;
  EXPECT_EQ(code_of([&] { wire::frame_decode(version); }), ErrorCode::VersionMismatch);
}

TEST(Store, PutGetList) {
  TempDir dir;
  DeterministicRng rng(2);
  broker::FileStore store(dir.path());
  std::vector<broker::StoredSecSla> recs;
  for (int i = 0; i < 30; ++i) {
    recs.push_back(random_record(rng));
    store.put(recs.back());
  }
  EXPECT_EQ(store.list().size(), 30u);
  for (const auto& r : recs) EXPECT_EQ(store.get(r.anonymous_id), r);
  EXPECT_EQ(code_of([&] { store.get(std::string(64, 'a')); }), ErrorCode::NotFound);
  EXPECT_EQ(code_of([&] { store.get("../etc/passwd"); }), ErrorCode::NotFound);

  broker::FileStore reopened(dir.path());
  EXPECT_EQ(reopened.list(), store.list());
  EXPECT_EQ(reopened.get(recs[7].anonymous_id), recs[7]);
}

TEST(Store, BitFlipIsCorrupt) {
  TempDir dir;
  DeterministicRng rng(3);
  broker::FileStore store(dir.path());
  auto r = random_record(rng);
  store.put(r);
  auto path = store.path_of(r.anonymous_id);
  std::string text = slurp(path);
  for (std::size_t pos : {text.find("encrypted_tokens") + 22, text.find("submitted_at") + 16}) {
    std::string bad = text;
    bad[pos] = bad[pos] == '1' ? '2' : '1';
    std::ofstream(path, std::ios::binary | std::ios::trunc) << bad;
    EXPECT_EQ(code_of([&] { store.get(r.anonymous_id); }), ErrorCode::Corrupt) << pos;
  }
  std::ofstream(path, std::ios::binary | std::ios::trunc) << "{not json";
  EXPECT_EQ(code_of([&] { store.get(r.anonymous_id); }), ErrorCode::Corrupt);
}

TEST(Config, JsonAndEnvironment) {
  auto cfg = broker::broker_config_from_json(R"({"listen":"tcp:0.0.0.0:9000","mode":"validated",
      "cac_copies":10,"scheme":"prioritized","weights":{"LI":"0.25"},"relays":["tcp:127.0.0.1:7501"]})");
  EXPECT_EQ(cfg.listen.port, 9000);
  EXPECT_EQ(cfg.mode, QeseMode::Validated);
  EXPECT_EQ(cfg.cac_copies, 10u);
  EXPECT_EQ(cfg.scheme, ranking::Scheme::Prioritized);
  EXPECT_EQ(cfg.weights.li, ranking::Rational(1, 4));
  EXPECT_EQ(cfg.relays.size(), 1u);
  EXPECT_EQ(code_of([] { broker::broker_config_from_json(R"({"cac_copies":1})"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { broker::broker_config_from_json(R"({"mode":"fast"})"); }), ErrorCode::Config);

  ::setenv("QRES_MODE", "basic", 1);
  ::setenv("QRES_STORE_PATH", "/tmp/elsewhere", 1);
  broker::apply_env_overrides(cfg);
  EXPECT_EQ(cfg.mode, QeseMode::Basic);
  EXPECT_EQ(cfg.store_path, "/tmp/elsewhere");
  ::setenv("QRES_CAC_COPIES", "many", 1);
  EXPECT_EQ(code_of([&] { broker::apply_env_overrides(cfg); }), ErrorCode::Config);
  ::unsetenv("QRES_MODE");
  ::unsetenv("QRES_STORE_PATH");
  ::unsetenv("QRES_CAC_COPIES");
}

TEST(Broker, MessagesRoundTrip) {
  broker::SubmitRequest req;
  req.scheme = ranking::Scheme::Prioritized;
  req.weights = ranking::Weights{ranking::Rational(2), ranking::Rational(1, 3), ranking::Rational(0)};
  req.resolve_top = true;
  req.keywords = {{secsla::derive_token("a||1"), secsla::Priority::LI}, {secsla::derive_token("b||2"), secsla::Priority::NR}};
  auto back = broker::SubmitRequest::decode(req.encode());
  EXPECT_EQ(back.scheme, req.scheme);
  EXPECT_EQ(back.weights->li, req.weights->li);
  EXPECT_TRUE(back.resolve_top);
  ASSERT_EQ(back.keywords.size(), 2u);
  EXPECT_EQ(back.keywords[1].token, req.keywords[1].token);
  EXPECT_EQ(back.keywords[1].priority, secsla::Priority::NR);
  EXPECT_EQ(code_of([] { broker::SubmitRequest::decode(Bytes{0, 0, 0, 0, 0, 0, 9}); }), ErrorCode::Truncated);
}

TEST(Broker, RejectsBadSubmissionsAndEmptyStore) {
  TempDir dir;
  DeterministicRng rng(4);
  net::Network network;
  auto auditor = anon::Auditor::generate(rng);
  broker::BrokerConfig cfg;
  cfg.auditor_public_key = auditor.public_key();
  broker::Broker b(cfg, std::make_shared<broker::FileStore>(dir.path()), network);

  broker::SubmitRequest req;
  req.keywords = {{secsla::derive_token("x||1"), secsla::Priority::HI}};
  EXPECT_EQ(code_of([&] { b.handle_submit_requirements(req); }), ErrorCode::NoProviders);

  auto keys = sig_keygen(rng);
  auto secret = auditor.issue_auth_secret(anon::make_cert("acme", keys), rng);
  anon::SignedTokenList list;
  list.auth = anon::make_challenge(secret, rng);
  list.attach_key = sig_keygen(rng).pk;
  list.tokens.resize(3);
  for (auto& t : list.tokens) rng.fill(t.bytes);
  list.auditor_sig = auditor.sign_token_list("acme", list, sign(keys.sk, list.canonical_body()));
  EXPECT_EQ(b.register_secsla(list), list.auth.anon_id());

  auto tampered = list;
  tampered.tokens[0].bytes[0] ^= 1;
  EXPECT_EQ(code_of([&] { b.register_secsla(tampered); }), ErrorCode::SignatureInvalid);

  auto [ch, other] = net::make_channel_pair();
  broker::AttachRequest att{list.auth.anon_id(), make_nonce(rng), {}};
  att.sig = sign(keys.sk, broker::attach_message(att.anonymous_id, att.nonce));
  EXPECT_EQ(code_of([&] { b.attach(att, std::move(ch)); }), ErrorCode::SignatureInvalid);

  // stored but not attached
  EXPECT_EQ(code_of([&] { b.handle_submit_requirements(req); }), ErrorCode::ProviderUnreachable);
}

class Pipeline : public ::testing::Test {
 protected:
  TempDir dir;
  std::unique_ptr<LocalDeployment> dep;
  secsla::SecSlaDocument tmpl = scenario::generate({1, 5, 4, 1, scenario::WeightProfile::AllHigh, 1}).template_doc;

  void SetUp() override { dep = std::make_unique<LocalDeployment>(LocalDeployment::Options{dir.path() / "store"}); }

  secsla::RequirementsFile requirements(const std::vector<std::string>& values,
                                        secsla::Priority p = secsla::Priority::HI) {
    return {offering_with(tmpl, values), {{"S1", p}}};
  }
};

TEST_F(Pipeline, EngineeredOverlapsRankByHits) {
  std::vector<std::string> wanted = {"level1", "level2", "level3", "*", "*"};
  std::vector<std::vector<std::string>> offers = {
      {"level1", "level2", "level3", "level4", "level4"},
      {"level1", "level4", "level4", "level4", "level4"},
      {"level4", "level4", "level4", "level4", "level4"},
  };
  std::vector<std::string> ids;
  std::vector<test::oracle::Provider> plain;
  for (std::size_t i = 0; i < offers.size(); ++i) {
    auto doc = offering_with(tmpl, offers[i]);
    ids.push_back(dep->add_provider("provider-" + std::to_string(i), doc));
    plain.push_back({ids.back(), secsla::extract_slo_substrings(doc)});
  }
  auto req = requirements(wanted);
  auto rs = secsla::tokenize_requirements(req.doc, req.priorities, &tmpl);
  ASSERT_EQ(rs.keywords.size(), 3u);
  std::vector<std::string> kw;
  for (const auto& k : rs.keywords) kw.push_back(k.source);

  auto resp = dep->submit(broker::make_request(rs, ranking::Scheme::Boolean, std::nullopt, true));
  auto expect = test::oracle::rank_boolean(plain, kw);
  ASSERT_EQ(resp.ranking.entries.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(resp.ranking.entries[i].anon_id, expect[i].anon_id);
    EXPECT_EQ(resp.ranking.entries[i].score, ranking::Rational(expect[i].score.numerator(), expect[i].score.denominator()));
  }
  EXPECT_EQ(resp.ranking.entries[0].anon_id, ids[0]);
  EXPECT_EQ(resp.ranking.entries[0].score, 3);
  EXPECT_EQ(resp.ranking.entries[1].score, 1);
  EXPECT_EQ(resp.ranking.entries[2].score, 0);
  ASSERT_TRUE(resp.resolved_top.has_value());
  EXPECT_EQ(*resp.resolved_top, "provider-0");

  auto pr = dep->submit(broker::make_request(rs, ranking::Scheme::Prioritized));
  auto pexpect = test::oracle::rank_prioritized(plain, kw, {1, 1, 1});
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(pr.ranking.entries[i].anon_id, pexpect[i].anon_id);
    EXPECT_EQ(pr.ranking.entries[i].score,
              ranking::Rational(pexpect[i].score.numerator(), pexpect[i].score.denominator()));
  }

  auto nr = requirements(wanted, secsla::Priority::NR);
  auto nrs = secsla::tokenize_requirements(nr.doc, nr.priorities, &tmpl);
  auto zero = dep->submit(broker::make_request(nrs, ranking::Scheme::Prioritized));
  for (const auto& e : zero.ranking.entries) EXPECT_EQ(e.score, 0);

  // the store never holds identities
  for (const auto& id : dep->broker().store().list()) {
    std::string text = slurp(dir.path() / "store" / (id + ".json"));
    EXPECT_EQ(text.find("provider-"), std::string::npos);
  }
}

TEST_F(Pipeline, RestartKeepsRecordsAndDropoutIsIsolated) {
  std::vector<std::string> values = {"level1", "level2", "level3", "level4", "level1"};
  auto doc = offering_with(tmpl, values);
  auto a = dep->add_provider("alpha", doc);
  auto b = dep->add_provider("beta", doc, [](net::ChannelPtr ch) -> net::ChannelPtr {
    return std::make_unique<net::FaultyChannel>(std::move(ch), wire::FrameType::OtPayload, 2);
  });
  auto c = dep->add_provider("gamma", doc);

  dep->restart_broker();
  EXPECT_EQ(dep->broker().store().list().size(), 3u);

  auto req = requirements({"level1", "level2", "*", "*", "*"});
  auto rs = secsla::tokenize_requirements(req.doc, req.priorities, &tmpl);
  auto resp = dep->submit(broker::make_request(rs, ranking::Scheme::Boolean));
  ASSERT_EQ(resp.ranking.excluded, std::vector<std::string>{b});
  ASSERT_EQ(resp.ranking.entries.size(), 2u);
  for (const auto& e : resp.ranking.entries) {
    EXPECT_TRUE(e.anon_id == a || e.anon_id == c);
    EXPECT_EQ(e.score, 2);
  }
}

TEST_F(Pipeline, CustomerWithoutKeywordsIsRejected) {
  broker::SubmitRequest empty;
  EXPECT_EQ(code_of([&] { dep->submit(empty); }), ErrorCode::EmptyInput);
}
