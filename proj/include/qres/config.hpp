#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qres/channel.hpp"
#include "qres/crypto.hpp"
#include "qres/qese.hpp"
#include "qres/ranking.hpp"

namespace qres::broker {

struct BrokerConfig {
  net::Endpoint listen = net::Endpoint::parse("tcp:127.0.0.1:7400");
  std::filesystem::path store_path = "broker-store";
  std::optional<net::Endpoint> auditor;
  VerifyKey auditor_public_key{};
  std::optional<MacKey> validation_key;
  QeseMode mode = QeseMode::Basic;
  std::size_t cac_copies = 0;
  ranking::Scheme scheme = ranking::Scheme::Boolean;
  ranking::Weights weights;
  std::vector<net::Endpoint> relays;
  std::chrono::milliseconds session_timeout{120000};
};

// Reads a JSON config file (if given) and then applies QRES_* environment
// overrides. Config on bad values.
BrokerConfig load_broker_config(const std::optional<std::filesystem::path>& file);
BrokerConfig broker_config_from_json(std::string_view text);
void apply_env_overrides(BrokerConfig& cfg);

}  // namespace qres::broker
