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

#include "polyrdl/plugin/session.hpp"

#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/sync/tcp.hpp"

namespace polyrdl::plugin {

void reap_child(pid_t pid) {
  if (pid <= 0) return;
  ::kill(pid, SIGTERM);
  for (int i = 0; i < 200; ++i) {
    if (::waitpid(pid, nullptr, WNOHANG) == pid) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid, SIGKILL);
  ::waitpid(pid, nullptr, 0);
}

PluginSession::PluginSession(PluginDescriptor d, std::string host_replica, int fd, CommandExecutor& exec,
                             std::size_t queue_cap, pid_t child)
    : desc_(std::move(d)),
      host_replica_(std::move(host_replica)),
      fd_(fd),
      exec_(exec),
      cap_(queue_cap),
      child_(child) {}

PluginSession::~PluginSession() { stop(); }

void PluginSession::start() {
  writer_ = std::thread([this] { writer_loop(); });
  reader_ = std::thread([this] { reader_loop(); });
}

void PluginSession::stop() {
  std::call_once(stop_once_, [this] {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
    }
    cv_.notify_all();
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
    if (writer_.joinable()) writer_.join();
    if (reader_.joinable()) reader_.join();
    sync::close_fd(fd_);
    fd_ = -1;
    alive_ = false;
    reap_child(child_);
  });
}

std::size_t PluginSession::queued() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void PluginSession::dispatch(std::string_view core_function, const Update* update, const Bytes& result_view) {
  if (!desc_.subscribed(core_function)) return;
  if (!alive_) {
    ++dropped_;
    return;
  }
  Outgoing o;
  o.event.core_function = std::string(core_function);
  o.event.replica_id = host_replica_;
  if (update) o.event.update = *update;
  o.event.result_view = result_view;
  push(std::move(o));
}

void PluginSession::push(Outgoing o) {
  {
    std::lock_guard lock(mu_);
    if (o.droppable) {
      if (droppable_queued_ >= cap_) {
        for (auto it = queue_.begin(); it != queue_.end(); ++it) {
          if (it->droppable) {
            queue_.erase(it);
            --droppable_queued_;
            ++dropped_;
            break;
          }
        }
      }
      ++droppable_queued_;
    }
    queue_.push_back(std::move(o));
  }
  cv_.notify_one();
}

void PluginSession::writer_loop() {
  for (;;) {
    Outgoing o;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;  // stopping
      o = std::move(queue_.front());
      queue_.pop_front();
      if (o.droppable) --droppable_queued_;
    }
    Bytes frame;
    if (o.is_error) {
      frame = cdf::encode_frame(cdf::MsgType::kPluginErr, cdf::encode_error(o.error));
    } else {
      o.event.event_seq = next_event_seq_++;
      frame = cdf::encode_frame(cdf::MsgType::kPluginEvent, cdf::encode_event(o.event));
    }
    if (!alive_ || !sync::send_all(fd_, frame)) {
      alive_ = false;
      if (o.droppable) ++dropped_;
      if (!o.is_error) --next_event_seq_;
      continue;
    }
    if (!o.is_error) ++events_sent_;
  }
}

void PluginSession::reader_loop() {
  cdf::FrameBuffer buf;
  std::uint8_t chunk[65536];
  for (;;) {
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n <= 0) break;
    try {
      buf.feed(std::span<const std::uint8_t>(chunk, static_cast<std::size_t>(n)));
      while (auto f = buf.next()) {
        if (f->type != cdf::MsgType::kPluginCmd) {
          Outgoing o;
          o.droppable = false;
          o.is_error = true;
          o.error = {0, kBadArgs, "plug-ins may only send commands"};
          push(std::move(o));
          continue;
        }
        handle(cdf::decode_command(f->payload));
      }
    } catch (const cdf::DecodeError&) {
      break;  // connection-fatal
    }
  }
  alive_ = false;
  cv_.notify_all();
}

void PluginSession::handle(const cdf::PluginCommand& cmd) {
  ++commands_;
  Outgoing o;
  o.droppable = false;
  auto refuse = [&](std::uint16_t code, std::string msg) {
    o.is_error = true;
    o.error = {cmd.cmd_seq, code, std::move(msg)};
  };
  if (cmd.cmd_seq <= last_cmd_seq_) {
    refuse(kBadArgs, "cmd_seq " + std::to_string(cmd.cmd_seq) + " does not increase");
  } else if (last_cmd_seq_ = cmd.cmd_seq; !is_core_function(cmd.core_function)) {
    refuse(kUnknownFunction, "no core function " + cmd.core_function);
  } else if (!desc_.permitted(cmd.core_function)) {
    refuse(kPermissionDenied, desc_.plugin_id + " may not invoke " + cmd.core_function);
  } else {
    CommandReply r = exec_.execute(cmd);
    if (r.error) {
      o.is_error = true;
      o.error = std::move(*r.error);
    } else if (r.event) {
      o.event = std::move(*r.event);
    } else {
      refuse(kBadArgs, "no reply");
    }
  }
  push(std::move(o));
}

}  // namespace polyrdl::plugin
