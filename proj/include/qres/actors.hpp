#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qres/anonet.hpp"
#include "qres/broker.hpp"

// Provider and customer roles on top of the protocol modules.
namespace qres::actors {

struct Registration {
  anon::AuthSecret secret;
  MacKey validation_key;
  VerifyKey auditor_public_key;
};

struct Submission {
  std::string anonymous_id;
  SigKeyPair attach_keys;
};

// Everything a provider keeps between runs.
struct ProviderState {
  std::string provider_id;
  SigKeyPair cert_keys;
  SymKey k;
  std::optional<Registration> registration;
  std::vector<Submission> submissions;

  static ProviderState generate(const std::string& provider_id, Rng& rng);
  std::string to_json() const;
  static ProviderState from_json(std::string_view text);  // Config
};

class ProviderAgent {
 public:
  explicit ProviderAgent(ProviderState s) : s_(std::move(s)) {}

  const ProviderState& state() const { return s_; }
  anon::ProviderCert cert() const { return anon::make_cert(s_.provider_id, s_.cert_keys); }

  // AUDITOR_REGISTER round trip over a direct channel.
  void register_with(net::Channel& auditor);

  std::vector<EncryptedToken> encrypt(const secsla::SecSlaDocument& offering) const;

  // Builds a fresh challenge and attach key and has the auditor sign the list.
  // The attach key is remembered under the resulting anonymous id.
  anon::SignedTokenList certify(net::Channel& auditor, std::vector<EncryptedToken> tokens, Rng& rng);

  // The same in two offline steps: the request goes to the auditor, its
  // signature comes back.
  anon::SignRequest prepare_signing(std::vector<EncryptedToken> tokens, Rng& rng);
  anon::SignedTokenList accept_signature(const anon::SignRequest& req, const Signature& auditor_sig) const;

  // Stores the auditor's answer to register_with done out of band.
  void set_registration(const Registration& r) { s_.registration = r; }

  // REGISTER_SECSLA over an onion circuit. Returns the broker's anonymous id.
  std::string submit(net::Network& network, const std::array<anon::RelayInfo, anon::kOnionHops>& relays,
                     const net::Endpoint& broker, const anon::SignedTokenList& list, Rng& rng);

  // SERVE_ATTACH over an onion circuit; returns the circuit once acknowledged.
  net::ChannelPtr attach(net::Network& network, const std::array<anon::RelayInfo, anon::kOnionHops>& relays,
                         const net::Endpoint& broker, const std::string& anonymous_id, Rng& rng);

  // Answers QeSe sessions on `ch` until it closes.
  void serve(net::Channel& ch, Rng& rng) const;

 private:
  const Registration& registration() const;  // ProtocolError before register_with
  ProviderState s_;
};

// Customer side: one request/response exchange with the broker.
broker::SubmitResponse customer_submit(net::Channel& broker, const broker::SubmitRequest& req);

// Plain text table of a ranking, scores as decimals.
std::string render_ranking(const broker::SubmitResponse& resp);

}  // namespace qres::actors
