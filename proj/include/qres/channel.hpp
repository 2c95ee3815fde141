#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>

#include "qres/wire.hpp"

namespace qres::net {

using wire::Frame;
using wire::FrameType;

// Bidirectional frame pipe. recv blocks until a frame arrives, the peer
// closes (ChannelClosed) or the timeout passes (Timeout).
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Frame& f) = 0;
  virtual Frame recv() = 0;
  virtual void close() = 0;

  void set_timeout(std::chrono::milliseconds t) { timeout_ = t; }
  std::chrono::milliseconds timeout() const { return timeout_; }

  Frame recv_expect(FrameType want) {
    Frame f = recv();
    wire::expect_type(f, want);
    return f;
  }

 protected:
  std::chrono::milliseconds timeout_{0};  // 0 = wait forever
};

using ChannelPtr = std::unique_ptr<Channel>;

// Two connected in-process endpoints. Frames are serialized and reparsed at
// the boundary so byte-level behaviour matches the TCP transport.
std::pair<ChannelPtr, ChannelPtr> make_channel_pair();

// Records every byte sent and received through the wrapped channel.
class RecordingChannel final : public Channel {
 public:
  explicit RecordingChannel(ChannelPtr inner) : inner_(std::move(inner)) {}
  void send(const Frame& f) override;
  Frame recv() override;
  void close() override { inner_->close(); }

  Bytes received() const;
  Bytes sent() const;

 private:
  ChannelPtr inner_;
  mutable std::mutex mu_;
  Bytes received_;
  Bytes sent_;
};

// Closes the wrapped channel instead of sending the n-th frame of a given
// type, simulating a peer that drops mid-protocol.
class FaultyChannel final : public Channel {
 public:
  FaultyChannel(ChannelPtr inner, FrameType drop_on, int nth = 1)
      : inner_(std::move(inner)), drop_on_(drop_on), remaining_(nth) {}
  void send(const Frame& f) override;
  Frame recv() override;
  void close() override { inner_->close(); }
  bool tripped() const { return tripped_; }

 private:
  ChannelPtr inner_;
  FrameType drop_on_;
  int remaining_;
  bool tripped_ = false;
};

class TcpChannel final : public Channel {
 public:
  explicit TcpChannel(int fd);
  ~TcpChannel() override;
  void send(const Frame& f) override;
  Frame recv() override;
  void close() override;

 private:
  void read_exact(std::uint8_t* p, std::size_t n);
  int fd_;
  std::mutex send_mu_;
};

ChannelPtr tcp_connect(const std::string& host, std::uint16_t port);

class TcpListener {
 public:
  TcpListener(const std::string& host, std::uint16_t port);  // port 0 picks a free port
  ~TcpListener();
  std::uint16_t port() const { return port_; }
  ChannelPtr accept();  // ChannelClosed after close()
  void close();

 private:
  int fd_;
  std::uint16_t port_;
};

// Where a party can be reached: an in-process name or an IPv4 TCP endpoint.
struct Endpoint {
  enum class Transport : std::uint8_t { InProcess = 1, Tcp = 2 };
  Transport transport = Transport::InProcess;
  std::string name;        // InProcess
  std::uint32_t ipv4 = 0;  // Tcp, host order
  std::uint16_t port = 0;

  std::string to_string() const;              // "local:NAME" or "tcp:A.B.C.D:PORT"
  static Endpoint parse(std::string_view s);  // Config
  friend bool operator==(const Endpoint&, const Endpoint&) = default;
};

// Dials endpoints. In-process names are served by registered acceptors; the
// acceptor must return promptly and own the channel it is given.
class Network {
 public:
  using Acceptor = std::function<void(ChannelPtr)>;

  void listen(const std::string& name, Acceptor acceptor);
  void unlisten(const std::string& name);
  ChannelPtr dial(const Endpoint& ep);  // ProviderUnreachable when nobody listens

 private:
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Acceptor>> acceptors_;
};

}  // namespace qres::net
