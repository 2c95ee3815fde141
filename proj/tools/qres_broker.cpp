// Broker daemon.
#include <spdlog/spdlog.h>

#include "cli_common.hpp"
#include "qres/broker.hpp"

using namespace qres;

int main(int argc, char** argv) {
  CLI::App app{"QRES broker"};
  app.require_subcommand(1);
  std::string config_file, listen, store;
  auto* serve = app.add_subcommand("serve", "Store secSLAs and answer customer requests");
  serve->add_option("--config", config_file, "JSON config file; QRES_* variables override it");
  serve->add_option("--listen", listen, "Overrides the configured listen endpoint");
  serve->add_option("--store", store, "Overrides the configured store directory");

  return cli::run("qres-broker", app, argc, argv, [&] {
    auto cfg = broker::load_broker_config(config_file.empty() ? std::nullopt
                                                              : std::optional<std::filesystem::path>(config_file));
    if (!listen.empty()) cfg.listen = net::Endpoint::parse(listen);
    if (!store.empty()) cfg.store_path = store;
    if (cfg.auditor_public_key.bytes == VerifyKey{}.bytes)
      fail(ErrorCode::Config, "auditor_public_key is required");
    if (cfg.mode == QeseMode::Validated && !cfg.validation_key)
      fail(ErrorCode::Config, "validated mode needs validation_key");

    net::Network network;
    auto st = std::make_shared<broker::FileStore>(cfg.store_path);
    broker::Broker b(cfg, st, network);
    b.set_log([](const std::string& s) { spdlog::info("{}", s); });
    auto l = cli::listen_announce(cfg.listen);
    spdlog::info("broker: {} stored secSLAs, mode {}, scheme {}", st->list().size(), mode_name(cfg.mode),
                 ranking::scheme_name(cfg.scheme));
    cli::accept_forever(*l, [&](net::ChannelPtr ch) { b.accept(std::move(ch)); });
  });
}
