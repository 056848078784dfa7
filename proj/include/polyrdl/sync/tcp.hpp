// Copyright 2026 The polyrdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLYRDL_SYNC_TCP_HPP_
#define POLYRDL_SYNC_TCP_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/core/types.hpp"

namespace polyrdl::sync {

struct HostPort {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
};

/// Accepts "host:port", ":port" and "port".
HostPort parse_host_port(const std::string& s);

/// Blocking helpers shared with the plug-in code.
int tcp_listen(const HostPort& addr, int backlog = 16);
int tcp_connect(const HostPort& addr);
std::uint16_t local_port(int fd);
bool send_all(int fd, const Bytes& data);
void close_fd(int fd);

struct TcpOptions {
  // Port 0 binds an ephemeral port; an empty host disables listening.
  HostPort listen{"127.0.0.1", 0};
  std::vector<HostPort> peers;
  std::chrono::milliseconds backoff_base{100};
  std::chrono::milliseconds backoff_cap{5000};
  std::uint32_t frame_cap = cdf::kDefaultFrameCap;
};

/// Length-framed CDF over TCP with reconnecting dialers. Every new
/// connection, accepted or dialed, first carries the frame returned by the
/// greeting callback (a full sync).
class TcpTransport {
 public:
  using FrameHandler = std::function<void(const cdf::Frame&)>;
  using Greeting = std::function<Bytes()>;

  TcpTransport(TcpOptions opt, FrameHandler on_frame, Greeting greeting);
  ~TcpTransport();
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void start();
  void stop();

  std::uint16_t port() const { return port_; }
  /// Sends to every live connection; returns how many took the frame.
  std::size_t broadcast(const Bytes& frame);
  std::size_t connections() const;
  std::uint64_t decode_errors() const { return decode_errors_; }
  std::uint64_t connects() const { return connects_; }

 private:
  struct Conn {
    int fd;
    std::mutex write_mu;
  };

  void accept_loop();
  void dial_loop(HostPort peer);
  void serve(const std::shared_ptr<Conn>& c);
  bool sleep_for(std::chrono::milliseconds d);

  TcpOptions opt_;
  FrameHandler on_frame_;
  Greeting greeting_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::uint64_t> decode_errors_{0};
  std::atomic<std::uint64_t> connects_{0};
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::shared_ptr<Conn>> conns_;
  std::vector<std::thread> threads_;
};

}  // namespace polyrdl::sync

#endif  // POLYRDL_SYNC_TCP_HPP_
