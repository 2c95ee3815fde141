#pragma once

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "qres/anonet.hpp"
#include "qres/error.hpp"

namespace qres::cli {

// Exit status per failure class; documented in docs/cli.md.
inline int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Usage:
    case ErrorCode::Config:
      return 2;
    case ErrorCode::MalformedXml:
    case ErrorCode::SchemaViolation:
    case ErrorCode::DuplicateId:
    case ErrorCode::MissingValue:
    case ErrorCode::EmptySubstring:
    case ErrorCode::TemplateMismatch:
    case ErrorCode::MissingPriority:
    case ErrorCode::EmptyInput:
    case ErrorCode::FormatError:
    case ErrorCode::BadLength:
    case ErrorCode::BadTokenLength:
      return 3;
    case ErrorCode::CertInvalid:
    case ErrorCode::SignatureInvalid:
    case ErrorCode::AlreadyRegistered:
    case ErrorCode::ValidationRejected:
      return 4;
    case ErrorCode::ProviderUnreachable:
    case ErrorCode::ChannelClosed:
    case ErrorCode::Timeout:
    case ErrorCode::Io:
      return 5;
    case ErrorCode::NotFound:
    case ErrorCode::Unresolvable:
    case ErrorCode::NoProviders:
      return 6;
    case ErrorCode::Corrupt:
      return 7;
    default:
      return 8;
  }
}

inline void print_error(std::string_view tool, ErrorCode code, std::string_view msg) {
  std::cerr << "error tool=" << tool << " code=" << error_code_name(code) << " exit=" << exit_code_for(code)
            << " message=" << nlohmann::json(std::string(msg)).dump() << "\n";
}

// Parses and runs; every failure path prints one machine-parsable line.
inline int run(std::string_view tool, CLI::App& app, int argc, char** argv, const std::function<void()>& body) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(tool, ErrorCode::Usage, e.what());
    return exit_code_for(ErrorCode::Usage);
  }
  try {
    body();
    return 0;
  } catch (const Error& e) {
    print_error(tool, e.code(), e.detail());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    print_error(tool, ErrorCode::Io, e.what());
    return exit_code_for(ErrorCode::Io);
  }
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, std::string_view text) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write " + p.string());
    out << text;
    if (!out.flush()) fail(ErrorCode::Io, "cannot write " + p.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, p, ec);
  if (ec) fail(ErrorCode::Io, "cannot write " + p.string() + ": " + ec.message());
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  try {
    return nlohmann::json::parse(read_file(p));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::FormatError, p.string() + ": " + e.what());
  }
}

// "ENDPOINT=PUBKEYHEX", as printed by `qres-relay keygen`.
inline anon::RelayInfo parse_relay(const std::string& s) {
  auto eq = s.rfind('=');
  if (eq == std::string::npos) fail(ErrorCode::Usage, "relay must be ENDPOINT=PUBKEY: " + s);
  anon::RelayInfo r;
  r.endpoint = net::Endpoint::parse(s.substr(0, eq));
  try {
    r.pk.bytes = array_from_hex<32>(s.substr(eq + 1));
  } catch (const Error&) {
    fail(ErrorCode::Usage, "relay public key must be 64 hex digits: " + s);
  }
  return r;
}

inline std::array<anon::RelayInfo, anon::kOnionHops> parse_relays(const std::vector<std::string>& v) {
  if (v.size() != anon::kOnionHops) fail(ErrorCode::Usage, "exactly three --relay options are required");
  return {parse_relay(v[0]), parse_relay(v[1]), parse_relay(v[2])};
}

inline std::string host_of(const net::Endpoint& ep) {
  if (ep.transport != net::Endpoint::Transport::Tcp) fail(ErrorCode::Usage, "expected a tcp: endpoint");
  return std::to_string(ep.ipv4 >> 24) + "." + std::to_string((ep.ipv4 >> 16) & 255) + "." +
         std::to_string((ep.ipv4 >> 8) & 255) + "." + std::to_string(ep.ipv4 & 255);
}

// Binds and announces the bound endpoint on stdout (useful with port 0).
inline std::unique_ptr<net::TcpListener> listen_announce(const net::Endpoint& ep) {
  auto l = std::make_unique<net::TcpListener>(host_of(ep), ep.port);
  net::Endpoint bound = ep;
  bound.port = l->port();
  std::cout << "listening " << bound.to_string() << std::endl;
  return l;
}

// Accepts TCP connections forever, handing each to `fn` on the caller's thread.
inline void accept_forever(net::TcpListener& l, const std::function<void(net::ChannelPtr)>& fn) {
  for (;;) fn(l.accept());
}

}  // namespace qres::cli
