#pragma once

#include <filesystem>
#include <functional>
#include <list>
#include <memory>
#include <thread>

#include "qres/actors.hpp"
#include "qres/broker.hpp"

namespace qres {

// Auditor, three relays, broker and any number of providers wired together
// over one in-process network. Used by the tests, the acceptance run and the
// benchmark.
class LocalDeployment {
 public:
  struct Options {
    std::filesystem::path store_path;
    QeseMode mode = QeseMode::Basic;
    std::size_t cac_copies = 0;
    std::uint64_t seed = 1;
    std::chrono::milliseconds session_timeout{120000};
  };
  // Wraps the provider end of an attached circuit, e.g. to inject faults.
  using ChannelWrap = std::function<net::ChannelPtr(net::ChannelPtr)>;

  explicit LocalDeployment(Options opt);
  ~LocalDeployment();
  LocalDeployment(const LocalDeployment&) = delete;
  LocalDeployment& operator=(const LocalDeployment&) = delete;

  // Registers, certifies, submits through the relays and attaches. Returns the anonymous id.
  std::string add_provider(const std::string& provider_id, const secsla::SecSlaDocument& offering,
                           ChannelWrap wrap = nullptr);

  broker::SubmitResponse submit(const broker::SubmitRequest& req);

  // Replaces the broker with a fresh instance over the same store directory
  // and re-attaches every provider.
  void restart_broker();

  std::vector<anon::ProviderCert> provider_certs() const;

  anon::Auditor& auditor() { return auditor_; }
  broker::Broker& broker() { return *broker_; }
  net::Network& network() { return network_; }
  anon::LocalRelayChain& relays() { return *relays_; }
  const std::filesystem::path& store_path() const { return opt_.store_path; }

 private:
  struct Provider {
    actors::ProviderAgent agent;
    std::string anonymous_id;
    ChannelWrap wrap;
    std::shared_ptr<net::Channel> link;
    std::thread serving;
  };
  void attach(Provider& p);
  void stop_serving(Provider& p);
  void start_broker();

  Options opt_;
  DeterministicRng rng_;
  net::Network network_;
  anon::Auditor auditor_;
  std::unique_ptr<anon::LocalRelayChain> relays_;
  std::unique_ptr<broker::Broker> broker_;
  std::list<Provider> providers_;
  std::mutex mu_;
  std::list<std::thread> auditor_threads_;
  std::list<std::shared_ptr<net::Channel>> auditor_links_;
};

}  // namespace qres
