// Provider agent: keys, tokenization, encryption, anonymous submission and
// QeSe serving.
#include <thread>

#include "cli_common.hpp"
#include "qres/actors.hpp"
#include "qres/rng.hpp"

using namespace qres;

namespace {

actors::ProviderAgent load(const std::string& path) {
  return actors::ProviderAgent(actors::ProviderState::from_json(cli::read_file(path)));
}

void save(const std::string& path, const actors::ProviderAgent& a) { cli::write_file(path, a.state().to_json()); }

std::vector<EncryptedToken> read_tokens(const std::string& path) {
  auto j = cli::read_json(path);
  std::vector<EncryptedToken> out;
  try {
    for (const auto& t : j.at("encrypted_tokens")) out.push_back({array_from_hex<16>(t.get<std::string>())});
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, path + ": " + e.what());
  }
  return out;
}

net::ChannelPtr dial_auditor(net::Network& n, const std::string& ep) {
  auto ch = n.dial(net::Endpoint::parse(ep));
  ch->set_timeout(std::chrono::seconds(30));
  return ch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRES provider agent"};
  app.require_subcommand(1);
  std::string state = "provider.json";
  app.add_option("--state", state, "Provider state file")->capture_default_str();

  std::string id;
  bool force = false;
  auto* keygen = app.add_subcommand("keygen", "Create certificate and token keys");
  keygen->add_option("--id", id, "Provider identity")->required();
  keygen->add_flag("--force", force, "Overwrite an existing state file");

  std::string out_file;
  auto* cert = app.add_subcommand("export-cert", "Write the self-signed certificate");
  cert->add_option("--out", out_file, "Certificate file")->required();

  std::string auditor, registration_file;
  auto* reg = app.add_subcommand("register", "Register with the auditor");
  auto* reg_online = reg->add_option("--auditor", auditor, "Auditor endpoint tcp:HOST:PORT");
  reg->add_option("--registration", registration_file, "Registration file from `qres-auditor register`")
      ->excludes(reg_online);

  std::string secsla_file;
  auto* tok = app.add_subcommand("tokenize", "Print the SLO substrings and their tokens");
  tok->add_option("--secsla", secsla_file, "secSLA XML")->required();

  auto* enc = app.add_subcommand("encrypt", "Encrypt the tokens of a secSLA");
  enc->add_option("--secsla", secsla_file, "secSLA XML")->required();
  enc->add_option("--out", out_file, "Encrypted token file")->required();

  std::string tokens_file;
  auto* sreq = app.add_subcommand("sign-request", "Prepare the auditor signing request");
  sreq->add_option("--tokens", tokens_file, "Encrypted token file")->required();
  sreq->add_option("--out", out_file, "Request file for `qres-auditor sign-secsla`")->required();

  std::string request_file, signature_file, broker;
  std::vector<std::string> relays;
  auto* submit = app.add_subcommand("submit", "Send the signed list to the broker through the relays");
  submit->add_option("--tokens", tokens_file, "Encrypted token file (online signing)");
  submit->add_option("--auditor", auditor, "Auditor endpoint (online signing)");
  submit->add_option("--request", request_file, "Request file (offline signing)");
  submit->add_option("--signature", signature_file, "Signature file from `qres-auditor sign-secsla`");
  submit->add_option("--relay", relays, "ENDPOINT=PUBKEY, three times in path order")->required();
  submit->add_option("--broker", broker, "Broker endpoint")->required();

  std::string anon_id;
  bool once = false;
  auto* serve = app.add_subcommand("serve", "Attach to the broker and answer QeSe sessions");
  serve->add_option("--relay", relays, "ENDPOINT=PUBKEY, three times in path order")->required();
  serve->add_option("--broker", broker, "Broker endpoint")->required();
  serve->add_option("--anonymous-id", anon_id, "Submission to serve (default: latest)");
  serve->add_flag("--once", once, "Exit when the circuit closes instead of re-attaching");

  return cli::run("qres-provider", app, argc, argv, [&] {
    net::Network network;
    if (keygen->parsed()) {
      if (std::filesystem::exists(state) && !force) fail(ErrorCode::Usage, state + " exists (use --force)");
      actors::ProviderAgent a(actors::ProviderState::generate(id, system_rng()));
      save(state, a);
      std::cout << "provider " << id << " cert_public_key=" << to_hex(a.state().cert_keys.pk.bytes) << "\n";
    } else if (cert->parsed()) {
      auto a = load(state);
      cli::write_file(out_file, nlohmann::json{{"cert", to_hex(a.cert().encode())}}.dump(2) + "\n");
    } else if (reg->parsed()) {
      auto a = load(state);
      if (!registration_file.empty()) {
        auto j = cli::read_json(registration_file);
        actors::Registration r;
        r.secret.bytes = array_from_hex<16>(j.at("auth_secret").get<std::string>());
        r.validation_key.bytes = array_from_hex<32>(j.at("validation_key").get<std::string>());
        r.auditor_public_key.bytes = array_from_hex<32>(j.at("auditor_public_key").get<std::string>());
        a.set_registration(r);
      } else if (!auditor.empty()) {
        auto ch = dial_auditor(network, auditor);
        a.register_with(*ch);
      } else {
        fail(ErrorCode::Usage, "give --auditor or --registration");
      }
      save(state, a);
      std::cout << "registered\n";
    } else if (tok->parsed()) {
      auto doc = secsla::parse_secsla(cli::read_file(secsla_file));
      auto subs = secsla::extract_slo_substrings(doc);
      for (const auto& s : subs) std::cout << to_hex(secsla::derive_token(s).bytes) << " " << s << "\n";
      std::cout << subs.size() << " tokens\n";
    } else if (enc->parsed()) {
      auto a = load(state);
      auto tokens = a.encrypt(secsla::parse_secsla(cli::read_file(secsla_file)));
      nlohmann::json j;
      j["encrypted_tokens"] = nlohmann::json::array();
      for (const auto& t : tokens) j["encrypted_tokens"].push_back(to_hex(t.bytes));
      cli::write_file(out_file, j.dump(2) + "\n");
      std::cout << tokens.size() << " encrypted tokens\n";
    } else if (sreq->parsed()) {
      auto a = load(state);
      auto req = a.prepare_signing(read_tokens(tokens_file), system_rng());
      save(state, a);
      cli::write_file(out_file, nlohmann::json{{"sign_request", to_hex(req.encode())}}.dump(2) + "\n");
      std::cout << "anonymous_id=" << req.body.auth.anon_id() << "\n";
    } else if (submit->parsed()) {
      auto a = load(state);
      auto path = cli::parse_relays(relays);
      anon::SignedTokenList list;
      if (!request_file.empty()) {
        if (signature_file.empty()) fail(ErrorCode::Usage, "--request needs --signature");
        auto req = anon::SignRequest::decode(from_hex(cli::read_json(request_file).at("sign_request").get<std::string>()));
        Signature s{array_from_hex<64>(cli::read_json(signature_file).at("auditor_signature").get<std::string>())};
        list = a.accept_signature(req, s);
      } else {
        if (auditor.empty() || tokens_file.empty()) fail(ErrorCode::Usage, "give --auditor and --tokens, or --request and --signature");
        auto ch = dial_auditor(network, auditor);
        list = a.certify(*ch, read_tokens(tokens_file), system_rng());
        save(state, a);
      }
      auto got = a.submit(network, path, net::Endpoint::parse(broker), list, system_rng());
      std::cout << "anonymous_id=" << got << "\n";
    } else if (serve->parsed()) {
      auto a = load(state);
      auto path = cli::parse_relays(relays);
      if (anon_id.empty()) {
        if (a.state().submissions.empty()) fail(ErrorCode::Usage, "no submission to serve");
        anon_id = a.state().submissions.back().anonymous_id;
      }
      for (int backoff = 1;; backoff = std::min(backoff * 2, 30)) {
        try {
          auto ch = a.attach(network, path, net::Endpoint::parse(broker), anon_id, system_rng());
          std::cout << "attached " << anon_id << std::endl;
          backoff = 1;
          DeterministicRng rng(system_rng().bytes<32>());
          a.serve(*ch, rng);
          std::cout << "circuit closed" << std::endl;
        } catch (const Error& e) {
          if (once || (e.code() != ErrorCode::ProviderUnreachable && e.code() != ErrorCode::ChannelClosed &&
                       e.code() != ErrorCode::Timeout))
            throw;
          std::cerr << "attach failed (" << e.what() << "), retrying in " << backoff << "s\n";
        }
        if (once) return;
        std::this_thread::sleep_for(std::chrono::seconds(backoff));
      }
    }
  });
}
