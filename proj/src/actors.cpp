#include "qres/actors.hpp"

#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "qres/error.hpp"

namespace qres::actors {

using net::Frame;
using nlohmann::json;
using wire::FrameType;

ProviderState ProviderState::generate(const std::string& provider_id, Rng& rng) {
  if (provider_id.empty()) fail(ErrorCode::Usage, "provider id must not be empty");
  return {provider_id, sig_keygen(rng), keygen_sym(rng), std::nullopt, {}};
}

std::string ProviderState::to_json() const {
  json j;
  j["provider_id"] = provider_id;
  j["cert_secret_key"] = to_hex(cert_keys.sk.bytes);
  j["cert_public_key"] = to_hex(cert_keys.pk.bytes);
  j["token_key"] = to_hex(k.bytes);
  if (registration) {
    j["registration"] = {{"auth_secret", to_hex(registration->secret.bytes)},
                         {"validation_key", to_hex(registration->validation_key.bytes)},
                         {"auditor_public_key", to_hex(registration->auditor_public_key.bytes)}};
  }
  j["submissions"] = json::array();
  for (const auto& s : submissions)
    j["submissions"].push_back({{"anonymous_id", s.anonymous_id},
                                {"attach_secret_key", to_hex(s.attach_keys.sk.bytes)},
                                {"attach_public_key", to_hex(s.attach_keys.pk.bytes)}});
  return j.dump(2) + "\n";
}

ProviderState ProviderState::from_json(std::string_view text) {
  try {
    auto j = json::parse(text);
    ProviderState s;
    s.provider_id = j.at("provider_id").get<std::string>();
    s.cert_keys.sk.bytes = array_from_hex<64>(j.at("cert_secret_key").get<std::string>());
    s.cert_keys.pk.bytes = array_from_hex<32>(j.at("cert_public_key").get<std::string>());
    s.k.bytes = array_from_hex<16>(j.at("token_key").get<std::string>());
    if (j.contains("registration")) {
      const auto& r = j["registration"];
      Registration reg;
      reg.secret.bytes = array_from_hex<16>(r.at("auth_secret").get<std::string>());
      reg.validation_key.bytes = array_from_hex<32>(r.at("validation_key").get<std::string>());
      reg.auditor_public_key.bytes = array_from_hex<32>(r.at("auditor_public_key").get<std::string>());
      s.registration = reg;
    }
    for (const auto& e : j.at("submissions")) {
      Submission sub;
      sub.anonymous_id = e.at("anonymous_id").get<std::string>();
      sub.attach_keys.sk.bytes = array_from_hex<64>(e.at("attach_secret_key").get<std::string>());
      sub.attach_keys.pk.bytes = array_from_hex<32>(e.at("attach_public_key").get<std::string>());
      s.submissions.push_back(sub);
    }
    return s;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("provider state: ") + e.what());
  }
}

void ProviderAgent::register_with(net::Channel& auditor) {
  auditor.send({FrameType::AuditorRegister, cert().encode()});
  Frame f = auditor.recv_expect(FrameType::AuditorRegistered);
  Reader r(f.payload);
  Registration reg;
  reg.secret.bytes = r.fixed<16>();
  reg.validation_key.bytes = r.fixed<32>();
  reg.auditor_public_key.bytes = r.fixed<32>();
  r.expect_done();
  s_.registration = reg;
}

const Registration& ProviderAgent::registration() const {
  if (!s_.registration) fail(ErrorCode::ProtocolError, "provider is not registered with the auditor");
  return *s_.registration;
}

std::vector<EncryptedToken> ProviderAgent::encrypt(const secsla::SecSlaDocument& offering) const {
  std::vector<EncryptedToken> out;
  for (const auto& t : secsla::tokenize_offering(offering)) out.push_back(enc_token(s_.k, t));
  return out;
}

anon::SignRequest ProviderAgent::prepare_signing(std::vector<EncryptedToken> tokens, Rng& rng) {
  const auto& reg = registration();
  if (tokens.empty()) fail(ErrorCode::EmptyInput, "no tokens to submit");
  anon::SignRequest req;
  req.provider_id = s_.provider_id;
  req.body.auth = anon::make_challenge(reg.secret, rng);
  SigKeyPair attach_keys = sig_keygen(rng);
  req.body.attach_key = attach_keys.pk;
  req.body.tokens = std::move(tokens);
  req.request_sig = sign(s_.cert_keys.sk, req.body.canonical_body());
  s_.submissions.push_back({req.body.auth.anon_id(), attach_keys});
  return req;
}

anon::SignedTokenList ProviderAgent::accept_signature(const anon::SignRequest& req, const Signature& auditor_sig) const {
  anon::SignedTokenList list = req.body;
  list.auditor_sig = auditor_sig;
  if (!verify(registration().auditor_public_key, list.canonical_body(), list.auditor_sig))
    fail(ErrorCode::SignatureInvalid, "auditor signature does not verify");
  return list;
}

anon::SignedTokenList ProviderAgent::certify(net::Channel& auditor, std::vector<EncryptedToken> tokens, Rng& rng) {
  auto req = prepare_signing(std::move(tokens), rng);
  auditor.send({FrameType::AuditorSign, req.encode()});
  Frame f = auditor.recv_expect(FrameType::AuditorSignature);
  Reader r(f.payload);
  Signature sig{r.fixed<64>()};
  r.expect_done();
  return accept_signature(req, sig);
}

std::string ProviderAgent::submit(net::Network& network, const std::array<anon::RelayInfo, anon::kOnionHops>& relays,
                                  const net::Endpoint& broker, const anon::SignedTokenList& list, Rng& rng) {
  auto circuit = anon::OnionCircuit::open(network, relays, broker, {FrameType::RegisterSecSla, list.encode()}, rng);
  circuit->set_timeout(std::chrono::seconds(60));
  Frame f = circuit->recv_expect(FrameType::RegisterAck);
  circuit->close();
  Reader r(f.payload);
  std::string id = r.str();
  if (id != list.auth.anon_id()) fail(ErrorCode::ProtocolError, "broker acknowledged a different anonymous id");
  return id;
}

net::ChannelPtr ProviderAgent::attach(net::Network& network, const std::array<anon::RelayInfo, anon::kOnionHops>& relays,
                                      const net::Endpoint& broker, const std::string& anonymous_id, Rng& rng) {
  auto it = std::find_if(s_.submissions.begin(), s_.submissions.end(),
                         [&](const Submission& s) { return s.anonymous_id == anonymous_id; });
  if (it == s_.submissions.end()) fail(ErrorCode::NotFound, "no submission " + anonymous_id);
  broker::AttachRequest req;
  req.anonymous_id = anonymous_id;
  req.nonce = make_nonce(rng);
  req.sig = sign(it->attach_keys.sk, broker::attach_message(anonymous_id, req.nonce));
  auto circuit = anon::OnionCircuit::open(network, relays, broker, {FrameType::ServeAttach, req.encode()}, rng);
  circuit->set_timeout(std::chrono::seconds(60));
  circuit->recv_expect(FrameType::AttachAck);
  circuit->set_timeout(std::chrono::milliseconds(0));
  return circuit;
}

void ProviderAgent::serve(net::Channel& ch, Rng& rng) const {
  qese::ProviderSession session(s_.k, registration().validation_key);
  session.serve(ch, rng);
}

broker::SubmitResponse customer_submit(net::Channel& broker, const broker::SubmitRequest& req) {
  if (req.keywords.empty()) fail(ErrorCode::EmptyInput, "no keywords to submit");
  broker.send({FrameType::SubmitRequirements, req.encode()});
  Frame f = broker.recv_expect(FrameType::RankingResult);
  return broker::SubmitResponse::decode(f.payload);
}

std::string render_ranking(const broker::SubmitResponse& resp) {
  std::ostringstream out;
  const auto& r = resp.ranking;
  out << "scheme: " << ranking::scheme_name(r.scheme) << "\n";
  out << std::left << std::setw(6) << "rank" << std::setw(20) << "anonymous_id" << std::setw(14) << "score"
      << "hits\n";
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const auto& e = r.entries[i];
    std::string hits;
    for (auto h : e.hits_per_keyword) hits += std::to_string(h);
    out << std::left << std::setw(6) << (i + 1) << std::setw(20) << (e.anon_id.substr(0, 16) + "..") << std::setw(14)
        << ranking::render_decimal(e.score, 6) << hits << "\n";
  }
  for (const auto& x : r.excluded) out << "excluded: " << x << "\n";
  if (resp.resolved_top) out << "top provider: " << *resp.resolved_top << "\n";
  if (!resp.resolve_error.empty()) out << "resolve failed: " << resp.resolve_error << "\n";
  return out.str();
}

}  // namespace qres::actors
