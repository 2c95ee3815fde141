#include "qres/deployment.hpp"

#include "qres/error.hpp"

namespace qres {

namespace {
net::Endpoint local(const std::string& name) { return {net::Endpoint::Transport::InProcess, name, 0, 0}; }
}  // namespace

LocalDeployment::LocalDeployment(Options opt)
    : opt_(std::move(opt)), rng_(opt_.seed), auditor_(anon::Auditor::generate(rng_)) {
  relays_ = std::make_unique<anon::LocalRelayChain>(network_, rng_);
  network_.listen("auditor", [this](net::ChannelPtr ch) {
    std::shared_ptr<net::Channel> link(std::move(ch));
    std::lock_guard lk(mu_);
    auditor_links_.push_back(link);
    auditor_threads_.emplace_back([this, link, seed = rng_.next_u64()] {
      DeterministicRng r(seed);
      try {
        auditor_.serve(*link, r);
      } catch (const Error&) {
      }
    });
  });
  start_broker();
}

LocalDeployment::~LocalDeployment() {
  network_.unlisten("broker");
  network_.unlisten("auditor");
  if (broker_) broker_->stop();
  for (auto& p : providers_) stop_serving(p);
  {
    std::lock_guard lk(mu_);
    for (auto& l : auditor_links_) l->close();
  }
  for (auto& t : auditor_threads_) t.join();
  relays_.reset();
}

void LocalDeployment::start_broker() {
  broker::BrokerConfig cfg;
  cfg.listen = local("broker");
  cfg.store_path = opt_.store_path;
  cfg.auditor = local("auditor");
  cfg.auditor_public_key = auditor_.public_key();
  cfg.validation_key = auditor_.validation_key();
  cfg.mode = opt_.mode;
  cfg.cac_copies = opt_.cac_copies;
  cfg.session_timeout = opt_.session_timeout;
  broker_ = std::make_unique<broker::Broker>(cfg, std::make_shared<broker::FileStore>(opt_.store_path), network_);
  auto* b = broker_.get();
  network_.listen("broker", [b](net::ChannelPtr ch) { b->accept(std::move(ch)); });
}

std::string LocalDeployment::add_provider(const std::string& provider_id, const secsla::SecSlaDocument& offering,
                                          ChannelWrap wrap) {
  auto& p = providers_.emplace_back(Provider{actors::ProviderAgent(actors::ProviderState::generate(provider_id, rng_)),
                                             {}, std::move(wrap), nullptr, {}});
  auto aud = network_.dial(local("auditor"));
  aud->set_timeout(std::chrono::seconds(30));
  p.agent.register_with(*aud);
  auto list = p.agent.certify(*aud, p.agent.encrypt(offering), rng_);
  aud->close();
  p.anonymous_id = p.agent.submit(network_, relays_->info(), local("broker"), list, rng_);
  attach(p);
  return p.anonymous_id;
}

std::vector<anon::ProviderCert> LocalDeployment::provider_certs() const {
  std::vector<anon::ProviderCert> out;
  for (const auto& p : providers_) out.push_back(p.agent.cert());
  return out;
}

void LocalDeployment::attach(Provider& p) {
  net::ChannelPtr circuit = p.agent.attach(network_, relays_->info(), local("broker"), p.anonymous_id, rng_);
  if (p.wrap) circuit = p.wrap(std::move(circuit));
  p.link = std::shared_ptr<net::Channel>(std::move(circuit));
  p.serving = std::thread([&p, link = p.link, seed = rng_.next_u64()] {
    DeterministicRng r(seed);
    try {
      p.agent.serve(*link, r);
    } catch (const Error&) {
    }
    link->close();
  });
}

void LocalDeployment::stop_serving(Provider& p) {
  if (p.link) p.link->close();
  if (p.serving.joinable()) p.serving.join();
  p.link.reset();
}

broker::SubmitResponse LocalDeployment::submit(const broker::SubmitRequest& req) {
  auto ch = network_.dial(local("broker"));
  auto resp = actors::customer_submit(*ch, req);
  ch->close();
  return resp;
}

void LocalDeployment::restart_broker() {
  network_.unlisten("broker");
  broker_->stop();
  for (auto& p : providers_) stop_serving(p);
  broker_.reset();
  start_broker();
  for (auto& p : providers_) attach(p);
  for (int i = 0; i < 500 && broker_->attached_count() < providers_.size(); ++i)
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
}

}  // namespace qres
