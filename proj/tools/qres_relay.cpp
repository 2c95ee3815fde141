// One onion relay reachable over TCP.
#include "cli_common.hpp"
#include "qres/rng.hpp"

using namespace qres;

int main(int argc, char** argv) {
  CLI::App app{"Onion relay"};
  app.require_subcommand(1);
  std::string key_file, listen = "tcp:127.0.0.1:7501";

  auto* keygen = app.add_subcommand("keygen", "Create a relay key and print its public key");
  keygen->add_option("--key", key_file, "Relay key file")->required();
  auto* serve = app.add_subcommand("serve", "Forward circuits");
  serve->add_option("--key", key_file, "Relay key file")->required();
  serve->add_option("--listen", listen, "tcp:HOST:PORT")->capture_default_str();

  return cli::run("qres-relay", app, argc, argv, [&] {
    if (keygen->parsed()) {
      auto k = anon::hop_keygen(system_rng());
      nlohmann::json j{{"secret_key", to_hex(k.sk.bytes)}, {"public_key", to_hex(k.pk.bytes)}};
      cli::write_file(key_file, j.dump(2) + "\n");
      std::cout << to_hex(k.pk.bytes) << "\n";
      return;
    }
    auto j = cli::read_json(key_file);
    anon::HopKey k;
    try {
      k.sk.bytes = array_from_hex<32>(j.at("secret_key").get<std::string>());
      k.pk.bytes = array_from_hex<32>(j.at("public_key").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Config, std::string("relay key file: ") + e.what());
    }
    net::Network network;
    anon::Relay relay(k, network);
    auto ep = net::Endpoint::parse(listen);
    auto l = cli::listen_announce(ep);
    ep.port = l->port();
    std::cout << "relay " << ep.to_string() << "=" << to_hex(k.pk.bytes) << std::endl;
    cli::accept_forever(*l, [&](net::ChannelPtr ch) { relay.accept(std::move(ch)); });
  });
}
