#include "qres/config.hpp"

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "qres/error.hpp"

namespace qres::broker {

using nlohmann::json;

namespace {

std::vector<net::Endpoint> parse_endpoint_list(std::string_view s) {
  std::vector<net::Endpoint> out;
  while (!s.empty()) {
    auto comma = s.find(',');
    auto item = s.substr(0, comma);
    if (!item.empty()) out.push_back(net::Endpoint::parse(item));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  try {
    std::size_t pos = 0;
    long long n = std::stoll(std::string(v), &pos);
    if (pos != v.size() || n < 0) throw std::invalid_argument("negative");
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    fail(ErrorCode::Config, std::string(key) + ": not a non-negative integer: " + std::string(v));
  }
}

VerifyKey parse_vk(std::string_view v) {
  try {
    return VerifyKey{array_from_hex<32>(v)};
  } catch (const Error& e) {
    fail(ErrorCode::Config, "auditor_public_key: " + e.detail());
  }
}

MacKey parse_mk(std::string_view v) {
  try {
    return MacKey{array_from_hex<32>(v)};
  } catch (const Error& e) {
    fail(ErrorCode::Config, "validation_key: " + e.detail());
  }
}

void check_cac(const BrokerConfig& c) {
  if (c.cac_copies == 1 || c.cac_copies > 255) fail(ErrorCode::Config, "cac_copies must be 0 or in [2, 255]");
}

}  // namespace

BrokerConfig broker_config_from_json(std::string_view text) {
  BrokerConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("config is not JSON: ") + e.what());
  }
  try {
    if (j.contains("listen")) c.listen = net::Endpoint::parse(j["listen"].get<std::string>());
    if (j.contains("store_path")) c.store_path = j["store_path"].get<std::string>();
    if (j.contains("auditor")) c.auditor = net::Endpoint::parse(j["auditor"].get<std::string>());
    if (j.contains("auditor_public_key")) c.auditor_public_key = parse_vk(j["auditor_public_key"].get<std::string>());
    if (j.contains("validation_key")) c.validation_key = parse_mk(j["validation_key"].get<std::string>());
    if (j.contains("mode")) c.mode = parse_mode(j["mode"].get<std::string>());
    if (j.contains("cac_copies")) c.cac_copies = j["cac_copies"].get<std::size_t>();
    if (j.contains("scheme")) c.scheme = ranking::parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      if (w.contains("HI")) c.weights.hi = ranking::parse_rational(w["HI"].get<std::string>());
      if (w.contains("LI")) c.weights.li = ranking::parse_rational(w["LI"].get<std::string>());
      if (w.contains("NR")) c.weights.nr = ranking::parse_rational(w["NR"].get<std::string>());
    }
    if (j.contains("relays"))
      for (const auto& r : j["relays"]) c.relays.push_back(net::Endpoint::parse(r.get<std::string>()));
    if (j.contains("session_timeout_ms"))
      c.session_timeout = std::chrono::milliseconds(j["session_timeout_ms"].get<std::int64_t>());
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("config field: ") + e.what());
  }
  check_cac(c);
  return c;
}

void apply_env_overrides(BrokerConfig& c) {
  auto env = [](const char* k) -> std::optional<std::string> {
    const char* v = std::getenv(k);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("QRES_LISTEN")) c.listen = net::Endpoint::parse(*v);
  if (auto v = env("QRES_STORE_PATH")) c.store_path = *v;
  if (auto v = env("QRES_AUDITOR")) c.auditor = net::Endpoint::parse(*v);
  if (auto v = env("QRES_AUDITOR_PUBLIC_KEY")) c.auditor_public_key = parse_vk(*v);
  if (auto v = env("QRES_VALIDATION_KEY")) c.validation_key = parse_mk(*v);
  if (auto v = env("QRES_MODE")) c.mode = parse_mode(*v);
  if (auto v = env("QRES_CAC_COPIES")) c.cac_copies = parse_count("QRES_CAC_COPIES", *v);
  if (auto v = env("QRES_SCHEME")) c.scheme = ranking::parse_scheme(*v);
  if (auto v = env("QRES_RELAYS")) c.relays = parse_endpoint_list(*v);
  if (auto v = env("QRES_SESSION_TIMEOUT_MS"))
    c.session_timeout = std::chrono::milliseconds(parse_count("QRES_SESSION_TIMEOUT_MS", *v));
  check_cac(c);
}

BrokerConfig load_broker_config(const std::optional<std::filesystem::path>& file) {
  BrokerConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) fail(ErrorCode::Config, "cannot read config file " + file->string());
    std::stringstream ss;
    ss << in.rdbuf();
    c = broker_config_from_json(ss.str());
  }
  apply_env_overrides(c);
  return c;
}

}  // namespace qres::broker
