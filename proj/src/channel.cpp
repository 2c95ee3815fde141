#include "qres/channel.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace qres::net {
namespace {

struct Queue {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Bytes> items;
  bool closed = false;
};

class LocalChannel final : public Channel {
 public:
  LocalChannel(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out) : in_(std::move(in)), out_(std::move(out)) {}
  ~LocalChannel() override { close(); }

  void send(const Frame& f) override {
    Bytes raw = wire::frame_encode(f);
    std::lock_guard lk(out_->mu);
    if (out_->closed) fail(ErrorCode::ChannelClosed, "peer closed");
    out_->items.push_back(std::move(raw));
    out_->cv.notify_one();
  }

  Frame recv() override {
    std::unique_lock lk(in_->mu);
    auto ready = [&] { return !in_->items.empty() || in_->closed; };
    if (timeout_.count() > 0) {
      if (!in_->cv.wait_for(lk, timeout_, ready)) fail(ErrorCode::Timeout, "no frame within timeout");
    } else {
      in_->cv.wait(lk, ready);
    }
    if (in_->items.empty()) fail(ErrorCode::ChannelClosed, "peer closed");
    Bytes raw = std::move(in_->items.front());
    in_->items.pop_front();
    lk.unlock();
    return wire::frame_decode(raw);
  }

  void close() override {
    for (auto* q : {in_.get(), out_.get()}) {
      std::lock_guard lk(q->mu);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Queue> in_, out_;
};

std::string errno_text() { return std::strerror(errno); }

}  // namespace

std::pair<ChannelPtr, ChannelPtr> make_channel_pair() {
  auto a = std::make_shared<Queue>();
  auto b = std::make_shared<Queue>();
  return {std::make_unique<LocalChannel>(a, b), std::make_unique<LocalChannel>(b, a)};
}

void RecordingChannel::send(const Frame& f) {
  inner_->send(f);
  std::lock_guard lk(mu_);
  append(sent_, wire::frame_encode(f));
}

Frame RecordingChannel::recv() {
  inner_->set_timeout(timeout_);
  Frame f = inner_->recv();
  std::lock_guard lk(mu_);
  append(received_, wire::frame_encode(f));
  return f;
}

Bytes RecordingChannel::received() const {
  std::lock_guard lk(mu_);
  return received_;
}

Bytes RecordingChannel::sent() const {
  std::lock_guard lk(mu_);
  return sent_;
}

void FaultyChannel::send(const Frame& f) {
  if (!tripped_ && f.type == drop_on_ && --remaining_ == 0) {
    tripped_ = true;
    inner_->close();
    fail(ErrorCode::ChannelClosed, "connection dropped");
  }
  inner_->send(f);
}

Frame FaultyChannel::recv() {
  inner_->set_timeout(timeout_);
  return inner_->recv();
}

TcpChannel::TcpChannel(int fd) : fd_(fd) {
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::send(const Frame& f) {
  Bytes raw = wire::frame_encode(f);
  std::lock_guard lk(send_mu_);
  std::size_t off = 0;
  while (off < raw.size()) {
    ssize_t n = ::send(fd_, raw.data() + off, raw.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) fail(ErrorCode::ChannelClosed, "send: " + errno_text());
    off += static_cast<std::size_t>(n);
  }
}

void TcpChannel::read_exact(std::uint8_t* p, std::size_t n) {
  std::size_t off = 0;
  while (off < n) {
    if (timeout_.count() > 0) {
      pollfd pfd{fd_, POLLIN, 0};
      int r = ::poll(&pfd, 1, static_cast<int>(timeout_.count()));
      if (r == 0) fail(ErrorCode::Timeout, "no data within timeout");
      if (r < 0 && errno != EINTR) fail(ErrorCode::ChannelClosed, "poll: " + errno_text());
      if (r < 0) continue;
    }
    ssize_t got = ::recv(fd_, p + off, n - off, 0);
    if (got < 0 && errno == EINTR) continue;
    if (got <= 0) fail(ErrorCode::ChannelClosed, "connection closed");
    off += static_cast<std::size_t>(got);
  }
}

Frame TcpChannel::recv() {
  std::uint8_t head[4];
  read_exact(head, 4);
  std::size_t total = wire::frame_size_from_header(ByteView(head, 4));
  Bytes raw(total);
  std::memcpy(raw.data(), head, 4);
  read_exact(raw.data() + 4, total - 4);
  return wire::frame_decode(raw);
}

void TcpChannel::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

ChannelPtr tcp_connect(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail(ErrorCode::Io, "socket: " + errno_text());
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    fail(ErrorCode::Config, "bad IPv4 address '" + host + "'");
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    std::string why = errno_text();
    ::close(fd);
    fail(ErrorCode::ProviderUnreachable, "connect " + host + ":" + std::to_string(port) + ": " + why);
  }
  return std::make_unique<TcpChannel>(fd);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) fail(ErrorCode::Io, "socket: " + errno_text());
  int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) fail(ErrorCode::Config, "bad IPv4 address '" + host + "'");
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 64) != 0) {
    std::string why = errno_text();
    ::close(fd_);
    fail(ErrorCode::Io, "listen " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

ChannelPtr TcpListener::accept() {
  for (;;) {
    int c = ::accept(fd_, nullptr, nullptr);
    if (c >= 0) return std::make_unique<TcpChannel>(c);
    if (errno == EINTR) continue;
    fail(ErrorCode::ChannelClosed, "listener closed");
  }
}

void TcpListener::close() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::string Endpoint::to_string() const {
  if (transport == Transport::InProcess) return "local:" + name;
  in_addr a{htonl(ipv4)};
  char buf[INET_ADDRSTRLEN];
  ::inet_ntop(AF_INET, &a, buf, sizeof buf);
  return "tcp:" + std::string(buf) + ":" + std::to_string(port);
}

Endpoint Endpoint::parse(std::string_view s) {
  Endpoint ep;
  if (s.substr(0, 6) == "local:") {
    ep.transport = Transport::InProcess;
    ep.name = std::string(s.substr(6));
    if (ep.name.empty()) fail(ErrorCode::Config, "empty in-process endpoint name");
    return ep;
  }
  if (s.substr(0, 4) == "tcp:") {
    auto rest = s.substr(4);
    auto colon = rest.rfind(':');
    if (colon == std::string_view::npos) fail(ErrorCode::Config, "endpoint lacks a port: " + std::string(s));
    std::string host(rest.substr(0, colon));
    in_addr a{};
    if (::inet_pton(AF_INET, host.c_str(), &a) != 1) fail(ErrorCode::Config, "bad IPv4 address in " + std::string(s));
    int port = 0;
    try {
      port = std::stoi(std::string(rest.substr(colon + 1)));
    } catch (const std::exception&) {
      port = -1;
    }
    // port 0 asks the listener for any free port
    if (port < 0 || port > 65535) fail(ErrorCode::Config, "bad port in " + std::string(s));
    ep.transport = Transport::Tcp;
    ep.ipv4 = ntohl(a.s_addr);
    ep.port = static_cast<std::uint16_t>(port);
    return ep;
  }
  fail(ErrorCode::Config, "endpoint must start with local: or tcp: (" + std::string(s) + ")");
}

void Network::listen(const std::string& name, Acceptor acceptor) {
  std::lock_guard lk(mu_);
  acceptors_[name] = std::make_shared<Acceptor>(std::move(acceptor));
}

void Network::unlisten(const std::string& name) {
  std::lock_guard lk(mu_);
  acceptors_.erase(name);
}

ChannelPtr Network::dial(const Endpoint& ep) {
  if (ep.transport == Endpoint::Transport::Tcp) {
    in_addr a{htonl(ep.ipv4)};
    char buf[INET_ADDRSTRLEN];
    ::inet_ntop(AF_INET, &a, buf, sizeof buf);
    return tcp_connect(buf, ep.port);
  }
  std::shared_ptr<Acceptor> acc;
  {
    std::lock_guard lk(mu_);
    auto it = acceptors_.find(ep.name);
    if (it == acceptors_.end()) fail(ErrorCode::ProviderUnreachable, "nothing listens on " + ep.to_string());
    acc = it->second;
  }
  auto [mine, theirs] = make_channel_pair();
  (*acc)(std::move(theirs));
  return std::move(mine);
}

}  // namespace qres::net
