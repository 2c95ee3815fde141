#include "qres/broker.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>

#include "qres/error.hpp"

namespace qres::broker {

using net::Frame;
using wire::FrameType;

namespace {

constexpr std::string_view kAttachDomain = "qres-attach";

std::string rational_str(const ranking::Rational& r) {
  auto num = boost::multiprecision::numerator(r).str();
  auto den = boost::multiprecision::denominator(r);
  return den == 1 ? num : num + "/" + den.str();
}

std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace

Bytes SubmitRequest::encode() const {
  Writer w;
  w.u8(static_cast<std::uint8_t>(scheme));
  w.u8(resolve_top ? 1 : 0);
  w.u8(weights ? 1 : 0);
  if (weights) {
    w.str(rational_str(weights->hi));
    w.str(rational_str(weights->li));
    w.str(rational_str(weights->nr));
  }
  w.u32(static_cast<std::uint32_t>(keywords.size()));
  for (const auto& k : keywords) {
    w.raw(k.token.bytes);
    w.u8(static_cast<std::uint8_t>(k.priority));
  }
  return std::move(w).take();
}

SubmitRequest SubmitRequest::decode(ByteView raw) {
  Reader r(raw);
  SubmitRequest s;
  auto scheme = r.u8();
  if (scheme > 1) fail(ErrorCode::ProtocolError, "unknown ranking scheme");
  s.scheme = static_cast<ranking::Scheme>(scheme);
  s.resolve_top = r.u8() != 0;
  if (r.u8()) {
    ranking::Weights w;
    w.hi = ranking::parse_rational(r.str());
    w.li = ranking::parse_rational(r.str());
    w.nr = ranking::parse_rational(r.str());
    s.weights = w;
  }
  auto n = r.u32();
  if (static_cast<std::size_t>(n) * 9 > r.remaining()) fail(ErrorCode::Truncated, "keyword list");
  for (std::uint32_t i = 0; i < n; ++i) {
    RequestedKeyword k;
    k.token.bytes = r.fixed<kTokenSize>();
    auto p = r.u8();
    if (p > 2) fail(ErrorCode::ProtocolError, "unknown priority");
    k.priority = static_cast<secsla::Priority>(p);
    s.keywords.push_back(k);
  }
  r.expect_done();
  return s;
}

SubmitRequest make_request(const secsla::RequirementSet& req, ranking::Scheme scheme,
                           std::optional<ranking::Weights> weights, bool resolve_top) {
  SubmitRequest s;
  s.scheme = scheme;
  s.weights = std::move(weights);
  s.resolve_top = resolve_top;
  for (const auto& k : req.keywords) s.keywords.push_back({k.token, k.priority});
  return s;
}

Bytes SubmitResponse::encode() const {
  Writer w;
  w.str(ranking.to_json());
  w.u8(resolved_top ? 1 : 0);
  if (resolved_top) w.str(*resolved_top);
  w.str(resolve_error);
  return std::move(w).take();
}

SubmitResponse SubmitResponse::decode(ByteView raw) {
  Reader r(raw);
  SubmitResponse s;
  s.ranking = ranking::RankingResult::from_json(r.str());
  if (r.u8()) s.resolved_top = r.str();
  s.resolve_error = r.str();
  r.expect_done();
  return s;
}

Bytes attach_message(const std::string& anonymous_id, const Nonce& nonce) {
  Writer w;
  w.raw(as_bytes(kAttachDomain));
  w.str(anonymous_id);
  w.raw(nonce.bytes);
  return std::move(w).take();
}

Bytes AttachRequest::encode() const {
  Writer w;
  w.str(anonymous_id);
  w.raw(nonce.bytes);
  w.raw(sig.bytes);
  return std::move(w).take();
}

AttachRequest AttachRequest::decode(ByteView raw) {
  Reader r(raw);
  AttachRequest a;
  a.anonymous_id = r.str();
  a.nonce.bytes = r.fixed<16>();
  a.sig.bytes = r.fixed<64>();
  r.expect_done();
  return a;
}

struct Broker::Conn {
  std::thread t;
  net::Channel* ch = nullptr;  // while serving; guarded by Broker::mu_
  std::atomic<bool> done{false};
};

Broker::Broker(BrokerConfig cfg, std::shared_ptr<SecSlaStore> store, net::Network& network)
    : cfg_(std::move(cfg)), store_(std::move(store)), network_(network), clock_(unix_now) {}

Broker::~Broker() { stop(); }

std::string Broker::register_secsla(const anon::SignedTokenList& list) {
  if (list.tokens.empty()) fail(ErrorCode::EmptyInput, "token list is empty");
  if (!verify(cfg_.auditor_public_key, list.canonical_body(), list.auditor_sig))
    fail(ErrorCode::SignatureInvalid, "auditor signature on the token list does not verify");
  StoredSecSla rec{list.auth.anon_id(), list, clock_()};
  store_->put(rec);
  log("stored secSLA " + rec.anonymous_id + " (" + std::to_string(list.tokens.size()) + " tokens)");
  return rec.anonymous_id;
}

void Broker::verify_attach(const AttachRequest& req) {
  StoredSecSla rec = store_->get(req.anonymous_id);
  if (!verify(rec.list.attach_key, attach_message(req.anonymous_id, req.nonce), req.sig))
    fail(ErrorCode::SignatureInvalid, "attach signature does not verify");
  Bytes nonce(req.nonce.bytes.begin(), req.nonce.bytes.end());
  std::lock_guard lk(mu_);
  if (!attach_nonces_.insert(nonce).second) fail(ErrorCode::ProtocolError, "attach nonce reused");
}

void Broker::install(const std::string& id, net::ChannelPtr ch, bool ack) {
  auto a = std::make_shared<Attachment>();
  a->ch = std::move(ch);
  a->ch->set_timeout(cfg_.session_timeout);
  std::unique_lock alk(a->mu);
  std::shared_ptr<Attachment> old;
  {
    std::lock_guard lk(mu_);
    if (stopped_) {
      a->ch->close();
      return;
    }
    auto& slot = attachments_[id];
    old = std::move(slot);
    slot = a;
  }
  if (ack) {
    try {
      a->ch->send({FrameType::AttachAck, {}});
    } catch (const Error&) {
      a->ch->close();
      alk.unlock();
      detach(id, a);
      throw;
    }
  }
  alk.unlock();
  if (old) {
    old->ch->close();
    std::lock_guard lk(old->mu);
  }
  log("provider " + id + " attached");
}

void Broker::attach(const AttachRequest& req, net::ChannelPtr ch) {
  verify_attach(req);
  install(req.anonymous_id, std::move(ch), false);
}

bool Broker::attached(const std::string& id) const {
  std::lock_guard lk(mu_);
  return attachments_.count(id) > 0;
}

std::size_t Broker::attached_count() const {
  std::lock_guard lk(mu_);
  return attachments_.size();
}

void Broker::detach(const std::string& id, const std::shared_ptr<Attachment>& a) {
  std::lock_guard lk(mu_);
  auto it = attachments_.find(id);
  if (it != attachments_.end() && it->second == a) attachments_.erase(it);
}

Broker::Outcome Broker::run_provider(const StoredSecSla& rec, std::span<const qese::KeywordInput> keywords) {
  std::shared_ptr<Attachment> a;
  {
    std::lock_guard lk(mu_);
    auto it = attachments_.find(rec.anonymous_id);
    if (it != attachments_.end()) a = it->second;
  }
  if (!a) return {std::nullopt, std::string(error_code_name(ErrorCode::ProviderUnreachable)) + ": not attached"};
  std::lock_guard lk(a->mu);
  DeterministicRng rng(system_rng().bytes<32>());
  qese::BrokerOptions opt{cfg_.mode, cfg_.cac_copies};
  try {
    return {qese::qese_match_provider(*a->ch, keywords, rec.list.tokens, opt, rng), {}};
  } catch (const Error& e) {
    a->ch->close();
    detach(rec.anonymous_id, a);
    return {std::nullopt, e.what()};
  }
}

SubmitResponse Broker::handle_submit_requirements(const SubmitRequest& req) {
  if (req.keywords.empty()) fail(ErrorCode::EmptyInput, "no keywords in request");
  auto ids = store_->list();
  if (ids.empty()) fail(ErrorCode::NoProviders, "no secSLAs stored");

  std::vector<qese::KeywordInput> keywords;
  for (const auto& k : req.keywords) {
    qese::KeywordInput in{k.token, std::nullopt};
    if (cfg_.mode == QeseMode::Validated) {
      if (!cfg_.validation_key) fail(ErrorCode::Config, "validated mode needs a validation key");
      in.tag = mac_tag(*cfg_.validation_key, k.token.bytes);
    }
    keywords.push_back(in);
  }

  std::vector<std::optional<StoredSecSla>> records(ids.size());
  std::vector<Outcome> outcomes(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    try {
      records[i] = store_->get(ids[i]);
    } catch (const Error& e) {
      outcomes[i].error = e.what();
    }
  }
  std::vector<std::thread> workers;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!records[i]) continue;
    workers.emplace_back([&, i] { outcomes[i] = run_provider(*records[i], keywords); });
  }
  for (auto& t : workers) t.join();

  std::vector<ranking::ProviderMatches> matched;
  std::vector<std::string> excluded;
  std::size_t width = 0;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!outcomes[i].matches) {
      excluded.push_back(ids[i]);
      log("excluded " + ids[i] + ": " + outcomes[i].error);
      continue;
    }
    matched.push_back({ids[i], std::move(outcomes[i].matches->rows)});
    width = std::max(width, records[i]->list.tokens.size());
  }
  if (matched.empty()) fail(ErrorCode::ProviderUnreachable, "no stored provider completed the search");

  SubmitResponse resp;
  if (req.scheme == ranking::Scheme::Boolean) {
    resp.ranking = ranking::rank_boolean(matched);
  } else {
    for (auto& p : matched)
      for (auto& row : p.rows) row.resize(width, 0);
    const ranking::Weights& w = req.weights ? *req.weights : cfg_.weights;
    std::vector<ranking::Rational> kw;
    for (const auto& k : req.keywords) kw.push_back(w.of(k.priority));
    resp.ranking = ranking::rank_prioritized(matched, kw);
  }
  resp.ranking.excluded = excluded;

  if (req.resolve_top && !resp.ranking.entries.empty()) {
    try {
      resp.resolved_top = resolve(resp.ranking.entries.front().anon_id);
    } catch (const Error& e) {
      resp.resolve_error = e.what();
    }
  }
  return resp;
}

std::string Broker::resolve(const std::string& anonymous_id) {
  if (!cfg_.auditor) fail(ErrorCode::Config, "no auditor endpoint configured");
  StoredSecSla rec = store_->get(anonymous_id);
  auto ch = network_.dial(*cfg_.auditor);
  ch->set_timeout(cfg_.session_timeout);
  Writer w;
  w.raw(rec.list.auth.nonce.bytes);
  w.raw(rec.list.auth.challenge);
  ch->send({FrameType::ResolveRequest, std::move(w).take()});
  Frame f = ch->recv_expect(FrameType::ResolveResult);
  ch->close();
  Reader r(f.payload);
  return r.str();
}

void Broker::accept(net::ChannelPtr ch) {
  auto c = std::make_shared<Conn>();
  std::lock_guard lk(mu_);
  if (stopped_) {
    ch->close();
    return;
  }
  for (auto it = conns_.begin(); it != conns_.end();) {
    if ((*it)->done) {
      (*it)->t.join();
      it = conns_.erase(it);
    } else {
      ++it;
    }
  }
  c->ch = ch.get();
  conns_.push_back(c);
  c->t = std::thread([this, c, p = std::move(ch)]() mutable {
    serve_conn(std::move(p), c.get());
    c->done = true;
  });
}

void Broker::serve_connection(net::ChannelPtr ch) { serve_conn(std::move(ch), nullptr); }

void Broker::serve_conn(net::ChannelPtr ch, Conn* conn) {
  auto release = [&] {
    if (!conn) return;
    std::lock_guard lk(mu_);
    conn->ch = nullptr;
  };
  for (;;) {
    Frame f;
    try {
      f = ch->recv();
    } catch (const Error&) {
      break;
    }
    try {
      switch (f.type) {
        case FrameType::RegisterSecSla: {
          auto id = register_secsla(anon::SignedTokenList::decode(f.payload));
          Writer w;
          w.str(id);
          ch->send({FrameType::RegisterAck, std::move(w).take()});
          break;
        }
        case FrameType::SubmitRequirements: {
          auto resp = handle_submit_requirements(SubmitRequest::decode(f.payload));
          ch->send({FrameType::RankingResult, resp.encode()});
          break;
        }
        case FrameType::ServeAttach: {
          auto req = AttachRequest::decode(f.payload);
          verify_attach(req);
          release();
          install(req.anonymous_id, std::move(ch), true);
          return;
        }
        default:
          fail(ErrorCode::ProtocolError, "broker does not accept " + std::string(wire::frame_type_name(f.type)));
      }
    } catch (const Error& e) {
      if (!ch) return;
      if (e.code() == ErrorCode::ChannelClosed) break;
      log(std::string("request failed: ") + e.what());
      try {
        ch->send(wire::error_frame(e));
      } catch (const Error&) {
        break;
      }
    }
  }
  release();
  ch->close();
}

void Broker::stop() {
  std::list<std::shared_ptr<Conn>> conns;
  std::map<std::string, std::shared_ptr<Attachment>> atts;
  {
    std::lock_guard lk(mu_);
    stopped_ = true;
    conns.swap(conns_);
    atts.swap(attachments_);
    for (auto& c : conns)
      if (c->ch) c->ch->close();
  }
  for (auto& [id, a] : atts) a->ch->close();
  for (auto& c : conns)
    if (c->t.joinable()) c->t.join();
}

}  // namespace qres::broker
