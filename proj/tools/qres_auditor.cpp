// Trusted registrar: registers providers, signs encrypted token lists and
// resolves anonymous ids.
#include <spdlog/spdlog.h>

#include <mutex>
#include <thread>

#include "cli_common.hpp"
#include "qres/rng.hpp"
#include "qres/store.hpp"

using namespace qres;

namespace {

anon::Auditor load(const std::string& path) { return anon::Auditor::from_json(cli::read_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QRES auditor"};
  app.require_subcommand(1);
  std::string state = "auditor.json";
  app.add_option("--state", state, "Auditor state file")->capture_default_str();

  bool force = false;
  auto* keygen = app.add_subcommand("keygen", "Create signing and validation keys");
  keygen->add_flag("--force", force, "Overwrite an existing state file");

  std::string cert_file, out_file;
  auto* reg = app.add_subcommand("register", "Verify a provider certificate and issue its secret");
  reg->add_option("--cert", cert_file, "Certificate from `qres-provider export-cert`")->required();
  reg->add_option("--out", out_file, "Registration file for the provider")->required();

  std::string request_file;
  auto* sig = app.add_subcommand("sign-secsla", "Sign a provider's encrypted token list");
  sig->add_option("--request", request_file, "Request from `qres-provider sign-request`")->required();
  sig->add_option("--out", out_file, "Signed token list for the provider")->required();

  std::string nonce_hex, challenge_hex, record_file;
  auto* res = app.add_subcommand("resolve", "Resolve an anonymous submission to a provider id");
  res->add_option("--nonce", nonce_hex, "Nonce, 32 hex digits");
  res->add_option("--challenge", challenge_hex, "Challenge digest, 64 hex digits");
  res->add_option("--record", record_file, "Broker store record instead of --nonce/--challenge");

  std::string listen = "tcp:127.0.0.1:7300";
  auto* serve = app.add_subcommand("serve", "Answer registration, signing and resolve requests");
  serve->add_option("--listen", listen, "tcp:HOST:PORT")->capture_default_str();

  return cli::run("qres-auditor", app, argc, argv, [&] {
    if (keygen->parsed()) {
      if (std::filesystem::exists(state) && !force) fail(ErrorCode::Usage, state + " exists (use --force)");
      auto a = anon::Auditor::generate(system_rng());
      cli::write_file(state, a.to_json());
      std::cout << "auditor_public_key=" << to_hex(a.public_key().bytes) << "\n"
                << "validation_key=" << to_hex(a.validation_key().bytes) << "\n";
    } else if (reg->parsed()) {
      auto a = load(state);
      auto j = cli::read_json(cert_file);
      auto cert = anon::ProviderCert::decode(from_hex(j.at("cert").get<std::string>()));
      auto secret = a.issue_auth_secret(cert, system_rng());
      cli::write_file(state, a.to_json());
      nlohmann::json out{{"auth_secret", to_hex(secret.bytes)},
                         {"validation_key", to_hex(a.validation_key().bytes)},
                         {"auditor_public_key", to_hex(a.public_key().bytes)}};
      cli::write_file(out_file, out.dump(2) + "\n");
      std::cout << "registered " << cert.provider_id << "\n";
    } else if (sig->parsed()) {
      auto a = load(state);
      auto j = cli::read_json(request_file);
      auto req = anon::SignRequest::decode(from_hex(j.at("sign_request").get<std::string>()));
      auto s = a.sign_token_list(req.provider_id, req.body, req.request_sig);
      cli::write_file(out_file, nlohmann::json{{"auditor_signature", to_hex(s.bytes)}}.dump(2) + "\n");
      std::cout << "signed " << req.body.tokens.size() << " tokens for " << req.body.auth.anon_id() << "\n";
    } else if (res->parsed()) {
      auto a = load(state);
      anon::AuthChallenge c;
      if (!record_file.empty()) {
        c = broker::record_from_json(cli::read_file(record_file)).list.auth;
      } else {
        if (nonce_hex.empty() || challenge_hex.empty())
          fail(ErrorCode::Usage, "give --record or both --nonce and --challenge");
        c.nonce.bytes = array_from_hex<16>(nonce_hex);
        c.challenge = array_from_hex<32>(challenge_hex);
      }
      std::cout << a.resolve_identity(c) << "\n";
    } else if (serve->parsed()) {
      auto a = load(state);
      std::mutex save_mu;
      auto l = cli::listen_announce(net::Endpoint::parse(listen));
      spdlog::info("auditor serving, {} providers registered", a.registered());
      cli::accept_forever(*l, [&](net::ChannelPtr ch) {
        std::thread([&, c = std::shared_ptr<net::Channel>(std::move(ch))] {
          DeterministicRng rng(system_rng().bytes<32>());
          auto before = a.registered();
          try {
            a.serve(*c, rng);
          } catch (const Error& e) {
            spdlog::warn("connection ended: {}", e.what());
          }
          if (a.registered() != before) {
            std::lock_guard lk(save_mu);
            cli::write_file(state, a.to_json());
            spdlog::info("{} providers registered", a.registered());
          }
        }).detach();
      });
    }
  });
}
