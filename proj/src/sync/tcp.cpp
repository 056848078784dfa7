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

#include "polyrdl/sync/tcp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <csignal>
#include <cstring>

#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/error.hpp"

namespace polyrdl::sync {

HostPort parse_host_port(const std::string& s) {
  HostPort hp;
  std::string port = s;
  if (auto colon = s.rfind(':'); colon != std::string::npos) {
    if (colon > 0) hp.host = s.substr(0, colon);
    port = s.substr(colon + 1);
  }
  char* end = nullptr;
  const long v = std::strtol(port.c_str(), &end, 10);
  if (port.empty() || *end != '\0' || v < 0 || v > 65535) throw Error(Errc::kInvalidArgument, "bad address: " + s);
  hp.port = static_cast<std::uint16_t>(v);
  return hp;
}

namespace {

sockaddr_in resolve(const HostPort& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  const std::string host = addr.host == "localhost" ? "127.0.0.1" : addr.host;
  if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res) {
      throw Error(Errc::kInvalidArgument, "cannot resolve " + addr.host);
    }
    sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }
  return sa;
}

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

}  // namespace

int tcp_listen(const HostPort& addr, int backlog) {
  ignore_sigpipe();
  const sockaddr_in sa = resolve(addr);
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw Error(Errc::kIo, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0 || ::listen(fd, backlog) != 0) {
    const int err = errno;
    ::close(fd);
    throw Error(Errc::kIo, "listen on port " + std::to_string(addr.port) + ": " + std::strerror(err));
  }
  return fd;
}

int tcp_connect(const HostPort& addr) {
  ignore_sigpipe();
  const sockaddr_in sa = resolve(addr);
  const int fd = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (fd < 0) return -1;
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0) {
    ::close(fd);
    return -1;
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return fd;
}

std::uint16_t local_port(int fd) {
  sockaddr_in sa{};
  socklen_t len = sizeof sa;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len);
  return ntohs(sa.sin_port);
}

bool send_all(int fd, const Bytes& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

void close_fd(int fd) {
  if (fd >= 0) ::close(fd);
}

TcpTransport::TcpTransport(TcpOptions opt, FrameHandler on_frame, Greeting greeting)
    : opt_(std::move(opt)), on_frame_(std::move(on_frame)), greeting_(std::move(greeting)) {}

TcpTransport::~TcpTransport() { stop(); }

void TcpTransport::start() {
  if (!opt_.listen.host.empty()) {
    listen_fd_ = tcp_listen(opt_.listen);
    port_ = local_port(listen_fd_);
    threads_.emplace_back([this] { accept_loop(); });
  }
  for (const auto& p : opt_.peers) threads_.emplace_back([this, p] { dial_loop(p); });
}

void TcpTransport::stop() {
  if (stopping_.exchange(true)) return;
  {
    std::lock_guard lock(mu_);
    for (const auto& c : conns_) ::shutdown(c->fd, SHUT_RDWR);
  }
  cv_.notify_all();
  if (listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
  threads_.clear();
  close_fd(listen_fd_);
  listen_fd_ = -1;
}

std::size_t TcpTransport::broadcast(const Bytes& frame) {
  std::vector<std::shared_ptr<Conn>> targets;
  {
    std::lock_guard lock(mu_);
    targets = conns_;
  }
  std::size_t ok = 0;
  for (const auto& c : targets) {
    std::lock_guard lock(c->write_mu);
    if (send_all(c->fd, frame)) {
      ++ok;
    } else {
      ::shutdown(c->fd, SHUT_RDWR);
    }
  }
  return ok;
}

std::size_t TcpTransport::connections() const {
  std::lock_guard lock(mu_);
  return conns_.size();
}

bool TcpTransport::sleep_for(std::chrono::milliseconds d) {
  std::unique_lock lock(mu_);
  return !cv_.wait_for(lock, d, [this] { return stopping_.load(); });
}

void TcpTransport::accept_loop() {
  std::vector<std::thread> servers;
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, 100);
    if (r <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto c = std::make_shared<Conn>();
    c->fd = fd;
    servers.emplace_back([this, c] { serve(c); });
  }
  for (auto& t : servers) t.join();
}

void TcpTransport::dial_loop(HostPort peer) {
  auto backoff = opt_.backoff_base;
  while (!stopping_) {
    const int fd = tcp_connect(peer);
    if (fd < 0) {
      if (!sleep_for(backoff)) return;
      backoff = std::min(backoff * 2, opt_.backoff_cap);
      continue;
    }
    backoff = opt_.backoff_base;
    auto c = std::make_shared<Conn>();
    c->fd = fd;
    serve(c);
    if (!stopping_ && !sleep_for(opt_.backoff_base)) return;
  }
}

void TcpTransport::serve(const std::shared_ptr<Conn>& c) {
  {
    std::lock_guard lock(mu_);
    if (stopping_) {
      ::close(c->fd);
      return;
    }
    conns_.push_back(c);
  }
  ++connects_;
  {
    const Bytes hello = greeting_ ? greeting_() : Bytes{};
    std::lock_guard lock(c->write_mu);
    if (!hello.empty()) send_all(c->fd, hello);
  }
  cdf::FrameBuffer buf(opt_.frame_cap);
  std::uint8_t chunk[65536];
  while (!stopping_) {
    const ssize_t n = ::recv(c->fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    bool fatal = false;
    try {
      buf.feed(std::span<const std::uint8_t>(chunk, static_cast<std::size_t>(n)));
      while (auto f = buf.next()) on_frame_(*f);
    } catch (const cdf::DecodeError&) {
      ++decode_errors_;
      fatal = true;
    } catch (const std::exception&) {
      fatal = true;
    }
    if (fatal) break;
  }
  {
    std::lock_guard lock(mu_);
    std::erase(conns_, c);
  }
  {
    std::lock_guard lock(c->write_mu);
    ::shutdown(c->fd, SHUT_RDWR);
    ::close(c->fd);
    c->fd = -1;
  }
}

}  // namespace polyrdl::sync
