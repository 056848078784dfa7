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

#include "polyrdl/plugin/endpoint.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/sync/tcp.hpp"

namespace polyrdl::plugin {

PluginEndpoint::PluginEndpoint(EndpointOptions opt, EventHandler on_event)
    : opt_(std::move(opt)), on_event_(std::move(on_event)) {}

PluginEndpoint::~PluginEndpoint() { stop(); }

void PluginEndpoint::start() {
  listen_fd_ = sync::tcp_listen({"127.0.0.1", opt_.port}, 4);
  port_ = sync::local_port(listen_fd_);
  thread_ = std::thread([this] { accept_loop(); });
}

void PluginEndpoint::stop() {
  if (stopping_.exchange(true)) return;
  {
    std::lock_guard lock(mu_);
    if (conn_fd_ >= 0) ::shutdown(conn_fd_, SHUT_RDWR);
  }
  if (thread_.joinable()) thread_.join();
  sync::close_fd(listen_fd_);
  listen_fd_ = -1;
  cv_.notify_all();
}

void PluginEndpoint::accept_loop() {
  while (!stopping_) {
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    serve(fd);
  }
}

void PluginEndpoint::serve(int fd) {
  cdf::FrameBuffer buf;
  std::uint8_t chunk[65536];
  bool greeted = false;
  auto finish = [&] {
    std::lock_guard lock(mu_);
    conn_fd_ = -1;
    greeted_ = false;
    // Wake callers whose replies will never come.
    for (auto& [seq, reply] : pending_) {
      if (!reply) reply = CommandReply{std::nullopt, cdf::PluginError{seq, 0, "host connection closed"}};
    }
    if (greeted) host_gone_ = true;
    cv_.notify_all();
  };
  {
    std::lock_guard lock(mu_);
    conn_fd_ = fd;
  }
  while (!stopping_) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    try {
      buf.feed(std::span<const std::uint8_t>(chunk, static_cast<std::size_t>(n)));
      bool stop_conn = false;
      while (auto f = buf.next()) {
        if (!greeted) {
          if (f->type != cdf::MsgType::kPluginHello) {
            stop_conn = true;
            break;
          }
          const cdf::PluginHello h = cdf::decode_hello(f->payload);
          if (h.plugin_id != opt_.plugin_id) {
            stop_conn = true;
            break;
          }
          std::lock_guard w(write_mu_);
          sync::send_all(fd, cdf::encode_frame(cdf::MsgType::kPluginHello,
                                               cdf::encode_hello({opt_.plugin_id, opt_.schema_version})));
          greeted = true;
          std::lock_guard lock(mu_);
          greeted_ = true;
          cv_.notify_all();
          continue;
        }
        if (f->type == cdf::MsgType::kPluginEvent) {
          cdf::PluginEvent ev = cdf::decode_event(f->payload);
          if (ev.reply_to != 0) {
            std::lock_guard lock(mu_);
            auto it = pending_.find(ev.reply_to);
            if (it != pending_.end()) it->second = CommandReply{std::move(ev), std::nullopt};
            cv_.notify_all();
            continue;
          }
          {
            std::lock_guard lock(mu_);
            if (last_seq_ != 0 && ev.event_seq != last_seq_ + 1) ++gaps_;
            last_seq_ = ev.event_seq;
          }
          if (on_event_) on_event_(ev);
          std::lock_guard lock(mu_);
          ++events_;
          cv_.notify_all();
        } else if (f->type == cdf::MsgType::kPluginErr) {
          cdf::PluginError err = cdf::decode_error(f->payload);
          std::lock_guard lock(mu_);
          auto it = pending_.find(err.ref_seq);
          if (it != pending_.end()) it->second = CommandReply{std::nullopt, std::move(err)};
          cv_.notify_all();
        }
      }
      if (stop_conn) break;
    } catch (const cdf::DecodeError&) {
      break;
    }
  }
  finish();
  sync::close_fd(fd);
}

bool PluginEndpoint::connected() const {
  std::lock_guard lock(mu_);
  return greeted_;
}

bool PluginEndpoint::wait_connected(std::chrono::milliseconds limit) {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, limit, [&] { return greeted_; });
}

void PluginEndpoint::wait_host_gone() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return host_gone_ || stopping_; });
}

CommandReply PluginEndpoint::call(const std::string& core_function, Bytes args, std::chrono::milliseconds limit) {
  std::uint64_t seq;
  int fd;
  {
    std::lock_guard lock(mu_);
    fd = conn_fd_;
    if (fd < 0 || !greeted_) return {std::nullopt, cdf::PluginError{0, 0, "not connected"}};
    seq = next_cmd_seq_++;
    pending_[seq] = std::nullopt;
  }
  {
    std::lock_guard w(write_mu_);
    const Bytes frame = cdf::encode_frame(cdf::MsgType::kPluginCmd,
                                          cdf::encode_command({seq, core_function, std::move(args)}));
    if (!sync::send_all(fd, frame)) {
      std::lock_guard lock(mu_);
      pending_.erase(seq);
      return {std::nullopt, cdf::PluginError{seq, 0, "send failed"}};
    }
  }
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, limit, [&] { return pending_[seq].has_value(); });
  std::optional<CommandReply> r = std::move(pending_[seq]);
  pending_.erase(seq);
  if (!r) return {std::nullopt, cdf::PluginError{seq, 0, "timed out"}};
  return std::move(*r);
}

bool PluginEndpoint::wait_for_events(std::uint64_t n, std::chrono::milliseconds limit) {
  std::unique_lock lock(mu_);
  return cv_.wait_for(lock, limit, [&] { return events_ >= n; });
}

std::uint64_t PluginEndpoint::events() const {
  std::lock_guard lock(mu_);
  return events_;
}

std::uint64_t PluginEndpoint::last_event_seq() const {
  std::lock_guard lock(mu_);
  return last_seq_;
}

std::uint64_t PluginEndpoint::seq_gaps() const {
  std::lock_guard lock(mu_);
  return gaps_;
}

}  // namespace polyrdl::plugin
