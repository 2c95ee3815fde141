#pragma once

#include <array>
#include <atomic>
#include <list>
#include <mutex>
#include <thread>

#include "qres/channel.hpp"
#include "qres/crypto.hpp"
#include "qres/group.hpp"

namespace qres::anon {

// ---- authentication secrets and challenges ----

inline constexpr std::size_t kAuthSecretSize = 16;

struct AuthSecret {
  ByteArray<kAuthSecretSize> bytes{};
  friend bool operator==(const AuthSecret&, const AuthSecret&) = default;
};

// (nonce, SHA-256(nonce || secret)); its hex digest is the anonymous id.
struct AuthChallenge {
  Nonce nonce;
  Digest challenge{};

  std::string anon_id() const { return to_hex(challenge); }
  friend bool operator==(const AuthChallenge&, const AuthChallenge&) = default;
};

AuthChallenge make_challenge(const AuthSecret& secret, Rng& rng);
bool check_challenge(const AuthSecret& secret, const AuthChallenge& c);

struct ProviderCert {
  std::string provider_id;
  VerifyKey pk;
  Signature self_sig;  // over "qres-cert-v1" || id || pk

  bool self_signed_ok() const;
  Bytes encode() const;
  static ProviderCert decode(ByteView raw);
};
ProviderCert make_cert(const std::string& provider_id, const SigKeyPair& keys);

// What the auditor signs and the broker stores: the anonymous challenge,
// the key the provider later uses to attach for QeSe sessions, and the
// encrypted token list in pre-field order.
struct SignedTokenList {
  AuthChallenge auth;
  VerifyKey attach_key;
  std::vector<EncryptedToken> tokens;
  Signature auditor_sig;

  Bytes canonical_body() const;
  Bytes encode() const;
  static SignedTokenList decode(ByteView raw);
};

class Auditor {
 public:
  Auditor(SigKeyPair signing, MacKey validation_key);
  Auditor(Auditor&& other) noexcept;
  static Auditor generate(Rng& rng);

  const VerifyKey& public_key() const { return keys_.pk; }
  const MacKey& validation_key() const { return k_val_; }

  AuthSecret issue_auth_secret(const ProviderCert& cert, Rng& rng);  // CertInvalid, AlreadyRegistered
  std::string resolve_identity(const AuthChallenge& c) const;        // Unresolvable

  // Signs for a registered provider whose request signature verifies and
  // whose challenge was built from its own secret. SignatureInvalid, NotFound.
  Signature sign_token_list(const std::string& provider_id, const SignedTokenList& body,
                            const Signature& request_sig) const;

  // Answers AUDITOR_REGISTER, AUDITOR_SIGN and RESOLVE_REQUEST frames until the channel closes.
  void serve(net::Channel& ch, Rng& rng);

  std::size_t registered() const;

  std::string to_json() const;
  static Auditor from_json(std::string_view text);

 private:
  struct Entry {
    AuthSecret secret;
    ProviderCert cert;
  };
  SigKeyPair keys_;
  MacKey k_val_;
  mutable std::mutex mu_;
  std::vector<Entry> registry_;
};

// Message bodies for the auditor frames.
struct SignRequest {
  std::string provider_id;
  SignedTokenList body;  // auditor_sig ignored
  Signature request_sig;  // provider's signature over body.canonical_body()

  Bytes encode() const;
  static SignRequest decode(ByteView raw);
};

// ---- onion routing ----

struct HopKey {
  group::Scalar sk;
  group::Element pk;
};
HopKey hop_keygen(Rng& rng);

struct OnionAddress {
  enum class Kind : std::uint8_t { Relay = 1, Destination = 2 };
  Kind kind = Kind::Relay;
  net::Endpoint endpoint;

  ByteArray<16> encode() const;                       // Config if the endpoint does not fit
  static OnionAddress decode(const ByteArray<16>& raw);  // PeelFailure
  friend bool operator==(const OnionAddress&, const OnionAddress&) = default;
};

inline constexpr std::size_t kOnionHops = 3;
inline constexpr std::size_t kLayerOverhead = 32 + 16 + 4 + 16;

// Symmetric keys a hop shares with the circuit originator after the first packet.
struct CircuitKeys {
  ByteArray<32> forward{};
  ByteArray<32> backward{};
};

struct BuiltOnion {
  Bytes packet;  // for hop 1
  std::array<CircuitKeys, kOnionHops> keys;
};

// next_addrs[i] is what hop i learns: hops 0 and 1 see the next relay, hop 2 the destination.
BuiltOnion onion_build(ByteView payload, const std::array<group::Element, kOnionHops>& hop_keys,
                       const std::array<OnionAddress, kOnionHops>& next_addrs, Rng& rng);

struct Peeled {
  OnionAddress next;
  Bytes inner;
  CircuitKeys keys;
};
Peeled onion_peel(const HopKey& key, ByteView packet);  // PeelFailure

// Counter-nonce AEAD used for cells after the first packet.
Bytes cell_seal(const ByteArray<32>& key, std::uint64_t counter, ByteView plain);
Bytes cell_open(const ByteArray<32>& key, std::uint64_t counter, ByteView sealed);  // PeelFailure

struct RelayInfo {
  net::Endpoint endpoint;
  group::Element pk;
};

// One relay: peels the first packet of each circuit, dials the next hop and
// pumps cells both ways, adding a layer on the way back.
class Relay {
 public:
  using Observer = std::function<void(bool inbound, ByteView bytes)>;

  Relay(HopKey key, net::Network& network);
  ~Relay();
  Relay(const Relay&) = delete;
  Relay& operator=(const Relay&) = delete;

  const group::Element& public_key() const { return key_.pk; }
  void accept(net::ChannelPtr upstream);
  void stop();
  void set_observer(Observer obs) { observer_ = std::move(obs); }
  std::size_t circuits_opened() const { return opened_.load(); }

 private:
  struct Circuit;
  void run(std::shared_ptr<Circuit> c);
  void reap();

  HopKey key_;
  net::Network& network_;
  Observer observer_;
  std::mutex mu_;
  std::list<std::shared_ptr<Circuit>> circuits_;
  std::atomic<std::size_t> opened_{0};
  bool stopped_ = false;
};

// Originator end of a 3-hop circuit. Behaves as a Channel to the destination.
class OnionCircuit final : public net::Channel {
 public:
  static std::unique_ptr<OnionCircuit> open(net::Network& network,
                                            const std::array<RelayInfo, kOnionHops>& relays,
                                            const net::Endpoint& destination, const net::Frame& first,
                                            Rng& rng);
  void send(const net::Frame& f) override;
  net::Frame recv() override;
  void close() override { link_->close(); }

 private:
  OnionCircuit(net::ChannelPtr link, std::array<CircuitKeys, kOnionHops> keys)
      : link_(std::move(link)), keys_(keys) {}

  net::ChannelPtr link_;
  std::array<CircuitKeys, kOnionHops> keys_;
  std::array<std::uint64_t, kOnionHops> fwd_ctr_{};
  std::array<std::uint64_t, kOnionHops> bwd_ctr_{};
  std::mutex send_mu_;
};

// Convenience: three in-process relays registered on `network` as
// "<prefix>1".."<prefix>3".
class LocalRelayChain {
 public:
  LocalRelayChain(net::Network& network, Rng& rng, const std::string& prefix = "relay");
  ~LocalRelayChain();
  std::array<RelayInfo, kOnionHops> info() const { return info_; }
  Relay& relay(std::size_t i) { return *relays_[i]; }

 private:
  net::Network& network_;
  std::array<std::unique_ptr<Relay>, kOnionHops> relays_;
  std::array<RelayInfo, kOnionHops> info_;
};

}  // namespace qres::anon
