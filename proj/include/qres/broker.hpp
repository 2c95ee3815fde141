#pragma once

#include <functional>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "qres/config.hpp"
#include "qres/store.hpp"

namespace qres::broker {

struct RequestedKeyword {
  Token token;
  secsla::Priority priority = secsla::Priority::HI;
};

struct SubmitRequest {
  ranking::Scheme scheme = ranking::Scheme::Boolean;
  std::optional<ranking::Weights> weights;  // broker defaults when absent
  std::vector<RequestedKeyword> keywords;
  bool resolve_top = false;

  Bytes encode() const;
  static SubmitRequest decode(ByteView raw);
};

SubmitRequest make_request(const secsla::RequirementSet& req, ranking::Scheme scheme,
                           std::optional<ranking::Weights> weights = std::nullopt, bool resolve_top = false);

struct SubmitResponse {
  ranking::RankingResult ranking;
  std::optional<std::string> resolved_top;  // provider id from the auditor
  std::string resolve_error;

  Bytes encode() const;
  static SubmitResponse decode(ByteView raw);
};

struct AttachRequest {
  std::string anonymous_id;
  Nonce nonce;
  Signature sig;  // by the attach key over attach_message(anonymous_id, nonce)

  Bytes encode() const;
  static AttachRequest decode(ByteView raw);
};
Bytes attach_message(const std::string& anonymous_id, const Nonce& nonce);

// Broker daemon logic. Providers reach it over onion circuits; customers
// connect directly.
class Broker {
 public:
  using Clock = std::function<std::int64_t()>;
  using Log = std::function<void(const std::string&)>;

  Broker(BrokerConfig cfg, std::shared_ptr<SecSlaStore> store, net::Network& network);
  ~Broker();
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  void set_clock(Clock c) { clock_ = std::move(c); }
  void set_log(Log l) { log_ = std::move(l); }

  // Verifies the auditor signature and stores the list. Returns the anonymous id.
  std::string register_secsla(const anon::SignedTokenList& list);  // SignatureInvalid, EmptyInput

  // Keeps `ch` as the QeSe channel for that provider. NotFound, SignatureInvalid, ProtocolError.
  void attach(const AttachRequest& req, net::ChannelPtr ch);
  bool attached(const std::string& anonymous_id) const;
  std::size_t attached_count() const;

  // NoProviders when the store is empty, ProviderUnreachable when nobody answered.
  SubmitResponse handle_submit_requirements(const SubmitRequest& req);

  std::string resolve(const std::string& anonymous_id);  // Config without an auditor, Unresolvable

  // Serves one connection on a new thread.
  void accept(net::ChannelPtr ch);
  // Blocking: answers REGISTER_SECSLA / SUBMIT_REQUIREMENTS, hands SERVE_ATTACH channels over.
  void serve_connection(net::ChannelPtr ch);
  void stop();

  SecSlaStore& store() { return *store_; }
  const BrokerConfig& config() const { return cfg_; }

 private:
  struct Attachment {
    net::ChannelPtr ch;
    std::mutex mu;
  };
  struct Outcome {
    std::optional<qese::MatchList> matches;
    std::string error;
  };
  Outcome run_provider(const StoredSecSla& rec, std::span<const qese::KeywordInput> keywords);
  struct Conn;
  void verify_attach(const AttachRequest& req);
  void install(const std::string& id, net::ChannelPtr ch, bool ack);
  void serve_conn(net::ChannelPtr ch, Conn* conn);
  void detach(const std::string& id, const std::shared_ptr<Attachment>& a);
  void log(const std::string& s) const {
    if (log_) log_(s);
  }

  BrokerConfig cfg_;
  std::shared_ptr<SecSlaStore> store_;
  net::Network& network_;
  Clock clock_;
  Log log_;

  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Attachment>> attachments_;
  std::set<Bytes> attach_nonces_;
  std::list<std::shared_ptr<Conn>> conns_;
  bool stopped_ = false;
};

}  // namespace qres::broker
