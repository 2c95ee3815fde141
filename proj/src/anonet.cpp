#include "qres/anonet.hpp"

#include <arpa/inet.h>
#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <nlohmann/json.hpp>

#include "qres/error.hpp"

namespace qres::anon {

using net::Frame;
using wire::FrameType;

namespace {

constexpr std::string_view kCertDomain = "qres-cert-v1";
constexpr std::string_view kListDomain = "qres-secsla-v1";
constexpr std::string_view kOnionDomain = "qres-onion-v1";

ByteArray<32> derive(std::string_view label, const Digest& base) { return hash({as_bytes(label), base}); }

struct LayerKeys {
  ByteArray<16> addr{};
  ByteArray<32> layer{};
  CircuitKeys circuit;
};

LayerKeys layer_keys(const group::Element& eph, const group::Element& shared) {
  Digest base = hash({as_bytes(kOnionDomain), eph.bytes, shared.bytes});
  LayerKeys k;
  auto a = derive("addr", base);
  std::copy_n(a.begin(), 16, k.addr.begin());
  k.layer = derive("layer", base);
  k.circuit.forward = derive("forward", base);
  k.circuit.backward = derive("backward", base);
  return k;
}

void counter_nonce(std::uint64_t counter, std::uint8_t out[crypto_aead_chacha20poly1305_IETF_NPUBBYTES]) {
  std::memset(out, 0, crypto_aead_chacha20poly1305_IETF_NPUBBYTES);
  for (int i = 0; i < 8; ++i) out[4 + i] = static_cast<std::uint8_t>(counter >> (56 - 8 * i));
}

Bytes aead_seal(const ByteArray<32>& key, std::uint64_t counter, ByteView ad, ByteView plain) {
  std::uint8_t nonce[crypto_aead_chacha20poly1305_IETF_NPUBBYTES];
  counter_nonce(counter, nonce);
  Bytes out(plain.size() + crypto_aead_chacha20poly1305_IETF_ABYTES);
  unsigned long long len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(out.data(), &len, plain.data(), plain.size(), ad.data(), ad.size(),
                                            nullptr, nonce, key.data());
  out.resize(len);
  return out;
}

Bytes aead_open(const ByteArray<32>& key, std::uint64_t counter, ByteView ad, ByteView sealed) {
  if (sealed.size() < crypto_aead_chacha20poly1305_IETF_ABYTES) fail(ErrorCode::PeelFailure, "cell too short");
  std::uint8_t nonce[crypto_aead_chacha20poly1305_IETF_NPUBBYTES];
  counter_nonce(counter, nonce);
  Bytes out(sealed.size() - crypto_aead_chacha20poly1305_IETF_ABYTES);
  unsigned long long len = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(out.data(), &len, nullptr, sealed.data(), sealed.size(), ad.data(),
                                                ad.size(), nonce, key.data()) != 0)
    fail(ErrorCode::PeelFailure, "layer authentication failed");
  out.resize(len);
  return out;
}

Bytes cert_body(const std::string& id, const VerifyKey& pk) {
  Writer w;
  w.raw(as_bytes(kCertDomain));
  w.str(id);
  w.raw(pk.bytes);
  return std::move(w).take();
}

}  // namespace

AuthChallenge make_challenge(const AuthSecret& secret, Rng& rng) {
  AuthChallenge c;
  c.nonce = make_nonce(rng);
  c.challenge = hash({c.nonce.bytes, secret.bytes});
  return c;
}

bool check_challenge(const AuthSecret& secret, const AuthChallenge& c) {
  return hash({c.nonce.bytes, secret.bytes}) == c.challenge;
}

bool ProviderCert::self_signed_ok() const {
  return !provider_id.empty() && verify(pk, cert_body(provider_id, pk), self_sig);
}

Bytes ProviderCert::encode() const {
  Writer w;
  w.str(provider_id);
  w.raw(pk.bytes);
  w.raw(self_sig.bytes);
  return std::move(w).take();
}

ProviderCert ProviderCert::decode(ByteView raw) {
  Reader r(raw);
  ProviderCert c;
  c.provider_id = r.str();
  c.pk.bytes = r.fixed<32>();
  c.self_sig.bytes = r.fixed<64>();
  r.expect_done();
  return c;
}

ProviderCert make_cert(const std::string& provider_id, const SigKeyPair& keys) {
  return {provider_id, keys.pk, sign(keys.sk, cert_body(provider_id, keys.pk))};
}

Bytes SignedTokenList::canonical_body() const {
  Writer w;
  w.raw(as_bytes(kListDomain));
  w.raw(auth.nonce.bytes);
  w.raw(auth.challenge);
  w.raw(attach_key.bytes);
  w.u32(static_cast<std::uint32_t>(tokens.size()));
  for (const auto& t : tokens) w.raw(t.bytes);
  return std::move(w).take();
}

Bytes SignedTokenList::encode() const {
  Writer w;
  w.raw(auth.nonce.bytes);
  w.raw(auth.challenge);
  w.raw(attach_key.bytes);
  w.u32(static_cast<std::uint32_t>(tokens.size()));
  for (const auto& t : tokens) w.raw(t.bytes);
  w.raw(auditor_sig.bytes);
  return std::move(w).take();
}

SignedTokenList SignedTokenList::decode(ByteView raw) {
  Reader r(raw);
  SignedTokenList s;
  s.auth.nonce.bytes = r.fixed<16>();
  s.auth.challenge = r.fixed<32>();
  s.attach_key.bytes = r.fixed<32>();
  std::uint32_t n = r.u32();
  if (static_cast<std::size_t>(n) * 16 > r.remaining()) fail(ErrorCode::Truncated, "token list");
  s.tokens.resize(n);
  for (auto& t : s.tokens) t.bytes = r.fixed<16>();
  s.auditor_sig.bytes = r.fixed<64>();
  r.expect_done();
  return s;
}

Bytes SignRequest::encode() const {
  Writer w;
  w.str(provider_id);
  w.blob(body.encode());
  w.raw(request_sig.bytes);
  return std::move(w).take();
}

SignRequest SignRequest::decode(ByteView raw) {
  Reader r(raw);
  SignRequest s;
  s.provider_id = r.str();
  s.body = SignedTokenList::decode(r.blob());
  s.request_sig.bytes = r.fixed<64>();
  r.expect_done();
  return s;
}

Auditor::Auditor(SigKeyPair signing, MacKey validation_key) : keys_(signing), k_val_(validation_key) {}

Auditor::Auditor(Auditor&& other) noexcept : keys_(other.keys_), k_val_(other.k_val_) {
  std::lock_guard lk(other.mu_);
  registry_ = std::move(other.registry_);
}

Auditor Auditor::generate(Rng& rng) { return Auditor(sig_keygen(rng), keygen_mac(rng)); }

AuthSecret Auditor::issue_auth_secret(const ProviderCert& cert, Rng& rng) {
  if (!cert.self_signed_ok()) fail(ErrorCode::CertInvalid, "certificate self-signature does not verify");
  std::lock_guard lk(mu_);
  for (const auto& e : registry_) {
    if (e.cert.provider_id == cert.provider_id || e.cert.pk == cert.pk)
      fail(ErrorCode::AlreadyRegistered, "provider '" + cert.provider_id + "' is already registered");
  }
  AuthSecret s;
  do {
    rng.fill(s.bytes);
  } while (std::any_of(registry_.begin(), registry_.end(), [&](const Entry& e) { return e.secret == s; }));
  registry_.push_back({s, cert});
  return s;
}

std::string Auditor::resolve_identity(const AuthChallenge& c) const {
  std::lock_guard lk(mu_);
  for (const auto& e : registry_)
    if (check_challenge(e.secret, c)) return e.cert.provider_id;
  fail(ErrorCode::Unresolvable, "no registered provider matches the challenge");
}

Signature Auditor::sign_token_list(const std::string& provider_id, const SignedTokenList& body,
                                   const Signature& request_sig) const {
  std::lock_guard lk(mu_);
  auto it = std::find_if(registry_.begin(), registry_.end(),
                         [&](const Entry& e) { return e.cert.provider_id == provider_id; });
  if (it == registry_.end()) fail(ErrorCode::NotFound, "provider '" + provider_id + "' is not registered");
  Bytes msg = body.canonical_body();
  if (!verify(it->cert.pk, msg, request_sig)) fail(ErrorCode::SignatureInvalid, "request signature does not verify");
  if (!check_challenge(it->secret, body.auth))
    fail(ErrorCode::SignatureInvalid, "challenge was not derived from the provider's secret");
  if (body.tokens.empty()) fail(ErrorCode::EmptyInput, "empty token list");
  return sign(keys_.sk, msg);
}

std::size_t Auditor::registered() const {
  std::lock_guard lk(mu_);
  return registry_.size();
}

void Auditor::serve(net::Channel& ch, Rng& rng) {
  for (;;) {
    Frame f;
    try {
      f = ch.recv();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ChannelClosed) return;
      throw;
    }
    try {
      switch (f.type) {
        case FrameType::AuditorRegister: {
          auto secret = issue_auth_secret(ProviderCert::decode(f.payload), rng);
          Writer w;
          w.raw(secret.bytes);
          w.raw(k_val_.bytes);
          w.raw(keys_.pk.bytes);
          ch.send({FrameType::AuditorRegistered, std::move(w).take()});
          break;
        }
        case FrameType::AuditorSign: {
          auto req = SignRequest::decode(f.payload);
          auto sig = sign_token_list(req.provider_id, req.body, req.request_sig);
          ch.send({FrameType::AuditorSignature, Bytes(sig.bytes.begin(), sig.bytes.end())});
          break;
        }
        case FrameType::ResolveRequest: {
          Reader r(f.payload);
          AuthChallenge c;
          c.nonce.bytes = r.fixed<16>();
          c.challenge = r.fixed<32>();
          r.expect_done();
          Writer w;
          w.str(resolve_identity(c));
          ch.send({FrameType::ResolveResult, std::move(w).take()});
          break;
        }
        default:
          fail(ErrorCode::ProtocolError, "auditor does not handle " + std::string(wire::frame_type_name(f.type)));
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ChannelClosed) return;
      try {
        ch.send(wire::error_frame(e));
      } catch (const Error&) {
        return;
      }
    }
  }
}

std::string Auditor::to_json() const {
  std::lock_guard lk(mu_);
  nlohmann::json j;
  j["signing_key"] = to_hex(keys_.sk.bytes);
  j["verify_key"] = to_hex(keys_.pk.bytes);
  j["validation_key"] = to_hex(k_val_.bytes);
  j["registry"] = nlohmann::json::array();
  for (const auto& e : registry_)
    j["registry"].push_back({{"secret", to_hex(e.secret.bytes)}, {"cert", to_hex(e.cert.encode())}});
  return j.dump(2);
}

Auditor Auditor::from_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    SigKeyPair kp;
    kp.sk.bytes = array_from_hex<64>(j.at("signing_key").get<std::string>());
    kp.pk.bytes = array_from_hex<32>(j.at("verify_key").get<std::string>());
    MacKey kv{array_from_hex<32>(j.at("validation_key").get<std::string>())};
    Auditor a(kp, kv);
    for (const auto& e : j.at("registry")) {
      Entry en;
      en.secret.bytes = array_from_hex<16>(e.at("secret").get<std::string>());
      en.cert = ProviderCert::decode(from_hex(e.at("cert").get<std::string>()));
      a.registry_.push_back(en);
    }
    return a;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("auditor state: ") + e.what());
  }
}

HopKey hop_keygen(Rng& rng) {
  HopKey k;
  k.sk = group::random_scalar(rng);
  k.pk = group::base_mul(k.sk);
  return k;
}

ByteArray<16> OnionAddress::encode() const {
  ByteArray<16> out{};
  out[0] = static_cast<std::uint8_t>(kind);
  out[1] = static_cast<std::uint8_t>(endpoint.transport);
  if (endpoint.transport == net::Endpoint::Transport::InProcess) {
    if (endpoint.name.size() > 13) fail(ErrorCode::Config, "in-process name longer than 13 bytes: " + endpoint.name);
    out[2] = static_cast<std::uint8_t>(endpoint.name.size());
    std::memcpy(out.data() + 3, endpoint.name.data(), endpoint.name.size());
  } else {
    for (int i = 0; i < 4; ++i) out[2 + i] = static_cast<std::uint8_t>(endpoint.ipv4 >> (24 - 8 * i));
    out[6] = static_cast<std::uint8_t>(endpoint.port >> 8);
    out[7] = static_cast<std::uint8_t>(endpoint.port);
  }
  return out;
}

OnionAddress OnionAddress::decode(const ByteArray<16>& raw) {
  OnionAddress a;
  if (raw[0] != 1 && raw[0] != 2) fail(ErrorCode::PeelFailure, "bad address kind");
  a.kind = static_cast<Kind>(raw[0]);
  if (raw[1] == 1) {
    if (raw[2] == 0 || raw[2] > 13) fail(ErrorCode::PeelFailure, "bad address name length");
    a.endpoint.transport = net::Endpoint::Transport::InProcess;
    a.endpoint.name.assign(reinterpret_cast<const char*>(raw.data() + 3), raw[2]);
  } else if (raw[1] == 2) {
    a.endpoint.transport = net::Endpoint::Transport::Tcp;
    a.endpoint.ipv4 = (std::uint32_t(raw[2]) << 24) | (std::uint32_t(raw[3]) << 16) | (std::uint32_t(raw[4]) << 8) | raw[5];
    a.endpoint.port = static_cast<std::uint16_t>((raw[6] << 8) | raw[7]);
  } else {
    fail(ErrorCode::PeelFailure, "bad address transport");
  }
  return a;
}

BuiltOnion onion_build(ByteView payload, const std::array<group::Element, kOnionHops>& hop_keys,
                       const std::array<OnionAddress, kOnionHops>& next_addrs, Rng& rng) {
  BuiltOnion out;
  Bytes inner(payload.begin(), payload.end());
  for (std::size_t h = kOnionHops; h-- > 0;) {
    if (!group::is_valid(hop_keys[h])) fail(ErrorCode::InvalidGroupElement, "hop key");
    auto e = group::random_scalar(rng);
    auto eph = group::base_mul(e);
    auto keys = layer_keys(eph, group::mul(hop_keys[h], e));
    out.keys[h] = keys.circuit;

    Block addr_ct = Aes128(keys.addr).encrypt(next_addrs[h].encode());
    Bytes ad(eph.bytes.begin(), eph.bytes.end());
    append(ad, addr_ct);
    Bytes ct = aead_seal(keys.layer, 0, ad, inner);

    Writer w;
    w.raw(ad);
    w.blob(ct);
    inner = std::move(w).take();
  }
  out.packet = std::move(inner);
  return out;
}

Peeled onion_peel(const HopKey& key, ByteView packet) {
  try {
    Reader r(packet);
    group::Element eph;
    eph.bytes = r.fixed<32>();
    Block addr_ct = r.fixed<16>();
    Bytes ct = r.blob();
    r.expect_done();
    if (!group::is_valid(eph)) fail(ErrorCode::PeelFailure, "bad ephemeral element");
    auto keys = layer_keys(eph, group::mul(eph, key.sk));
    Bytes ad(eph.bytes.begin(), eph.bytes.end());
    append(ad, addr_ct);
    Peeled p;
    p.inner = aead_open(keys.layer, 0, ad, ct);
    p.next = OnionAddress::decode(Aes128(keys.addr).decrypt(addr_ct));
    p.keys = keys.circuit;
    return p;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::PeelFailure) throw;
    fail(ErrorCode::PeelFailure, e.detail());
  }
}

Bytes cell_seal(const ByteArray<32>& key, std::uint64_t counter, ByteView plain) {
  return aead_seal(key, counter, {}, plain);
}

Bytes cell_open(const ByteArray<32>& key, std::uint64_t counter, ByteView sealed) {
  return aead_open(key, counter, {}, sealed);
}

struct Relay::Circuit {
  net::ChannelPtr upstream;
  net::ChannelPtr downstream;
  std::mutex mu;
  std::thread forward;
  std::thread backward;
  std::atomic<bool> done{false};

  void close_all() {
    std::lock_guard lk(mu);
    if (upstream) upstream->close();
    if (downstream) downstream->close();
  }
};

Relay::Relay(HopKey key, net::Network& network) : key_(key), network_(network) {}

Relay::~Relay() { stop(); }

void Relay::accept(net::ChannelPtr upstream) {
  auto c = std::make_shared<Circuit>();
  c->upstream = std::move(upstream);
  std::lock_guard lk(mu_);
  if (stopped_) {
    c->upstream->close();
    return;
  }
  reap();
  circuits_.push_back(c);
  c->forward = std::thread([this, c] { run(c); });
}

void Relay::reap() {
  for (auto it = circuits_.begin(); it != circuits_.end();) {
    if ((*it)->done.load()) {
      if ((*it)->forward.joinable()) (*it)->forward.join();
      if ((*it)->backward.joinable()) (*it)->backward.join();
      it = circuits_.erase(it);
    } else {
      ++it;
    }
  }
}

void Relay::run(std::shared_ptr<Circuit> c) {
  try {
    Frame first = c->upstream->recv_expect(FrameType::OnionCreate);
    if (observer_) observer_(true, first.payload);
    Peeled p = onion_peel(key_, first.payload);
    const bool to_relay = p.next.kind == OnionAddress::Kind::Relay;
    net::ChannelPtr down = network_.dial(p.next.endpoint);
    {
      std::lock_guard lk(c->mu);
      c->downstream = std::move(down);
    }
    ++opened_;
    if (to_relay) {
      c->downstream->send({FrameType::OnionCreate, p.inner});
    } else {
      c->downstream->send(wire::frame_decode(p.inner));
    }
    if (observer_) observer_(false, p.inner);

    c->backward = std::thread([this, c, keys = p.keys, to_relay] {
      std::uint64_t ctr = 0;
      try {
        for (;;) {
          Frame f = c->downstream->recv();
          Bytes plain = to_relay ? (wire::expect_type(f, FrameType::OnionData), std::move(f.payload))
                                 : wire::frame_encode(f);
          c->upstream->send({FrameType::OnionData, cell_seal(keys.backward, ctr++, plain)});
        }
      } catch (const Error&) {
      }
      c->close_all();
    });

    std::uint64_t ctr = 0;
    for (;;) {
      Frame f = c->upstream->recv_expect(FrameType::OnionData);
      if (observer_) observer_(true, f.payload);
      Bytes plain = cell_open(p.keys.forward, ctr++, f.payload);
      if (observer_) observer_(false, plain);
      if (to_relay) {
        c->downstream->send({FrameType::OnionData, std::move(plain)});
      } else {
        c->downstream->send(wire::frame_decode(plain));
      }
    }
  } catch (const Error&) {
  }
  c->close_all();
  c->done = true;
}

void Relay::stop() {
  std::list<std::shared_ptr<Circuit>> all;
  {
    std::lock_guard lk(mu_);
    stopped_ = true;
    all.swap(circuits_);
  }
  for (auto& c : all) c->close_all();
  for (auto& c : all) {
    if (c->forward.joinable()) c->forward.join();
    if (c->backward.joinable()) c->backward.join();
  }
}

std::unique_ptr<OnionCircuit> OnionCircuit::open(net::Network& network,
                                                 const std::array<RelayInfo, kOnionHops>& relays,
                                                 const net::Endpoint& destination, const net::Frame& first,
                                                 Rng& rng) {
  std::array<group::Element, kOnionHops> keys{relays[0].pk, relays[1].pk, relays[2].pk};
  std::array<OnionAddress, kOnionHops> next{OnionAddress{OnionAddress::Kind::Relay, relays[1].endpoint},
                                            OnionAddress{OnionAddress::Kind::Relay, relays[2].endpoint},
                                            OnionAddress{OnionAddress::Kind::Destination, destination}};
  auto built = onion_build(wire::frame_encode(first), keys, next, rng);
  auto link = network.dial(relays[0].endpoint);
  link->send({FrameType::OnionCreate, std::move(built.packet)});
  return std::unique_ptr<OnionCircuit>(new OnionCircuit(std::move(link), built.keys));
}

void OnionCircuit::send(const net::Frame& f) {
  std::lock_guard lk(send_mu_);
  Bytes cell = wire::frame_encode(f);
  for (std::size_t h = kOnionHops; h-- > 0;) cell = cell_seal(keys_[h].forward, fwd_ctr_[h]++, cell);
  link_->send({FrameType::OnionData, std::move(cell)});
}

net::Frame OnionCircuit::recv() {
  link_->set_timeout(timeout_);
  Frame f = link_->recv_expect(FrameType::OnionData);
  Bytes cell = std::move(f.payload);
  for (std::size_t h = 0; h < kOnionHops; ++h) cell = cell_open(keys_[h].backward, bwd_ctr_[h]++, cell);
  return wire::frame_decode(cell);
}

LocalRelayChain::LocalRelayChain(net::Network& network, Rng& rng, const std::string& prefix) : network_(network) {
  for (std::size_t i = 0; i < kOnionHops; ++i) {
    relays_[i] = std::make_unique<Relay>(hop_keygen(rng), network);
    std::string name = prefix + std::to_string(i + 1);
    Relay* r = relays_[i].get();
    network.listen(name, [r](net::ChannelPtr ch) { r->accept(std::move(ch)); });
    info_[i] = {net::Endpoint{net::Endpoint::Transport::InProcess, name, 0, 0}, r->public_key()};
  }
}

LocalRelayChain::~LocalRelayChain() {
  for (std::size_t i = 0; i < kOnionHops; ++i) {
    network_.unlisten(info_[i].endpoint.name);
    relays_[i]->stop();
  }
}

}  // namespace qres::anon
