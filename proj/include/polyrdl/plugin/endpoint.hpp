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

#ifndef POLYRDL_PLUGIN_ENDPOINT_HPP_
#define POLYRDL_PLUGIN_ENDPOINT_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/plugin/protocol.hpp"

namespace polyrdl::plugin {

struct EndpointOptions {
  std::string plugin_id;
  std::uint32_t schema_version = 1;
  std::uint16_t port = 0;  // 0 picks a free port
};

/// Plug-in side of the protocol: listens on loopback, answers the host's
/// HELLO, delivers unsolicited events to a handler and matches command
/// replies to callers.
class PluginEndpoint {
 public:
  using EventHandler = std::function<void(const cdf::PluginEvent&)>;

  PluginEndpoint(EndpointOptions opt, EventHandler on_event);
  ~PluginEndpoint();
  PluginEndpoint(const PluginEndpoint&) = delete;
  PluginEndpoint& operator=(const PluginEndpoint&) = delete;

  /// Binds the port. Throws Error{kIo} when it is taken.
  void start();
  void stop();
  std::uint16_t port() const { return port_; }

  bool wait_connected(std::chrono::milliseconds limit);
  bool connected() const;
  /// True once a host has connected and gone away again.
  bool host_gone() const { return host_gone_; }
  void wait_host_gone();

  /// Sends a command and waits for its reply. Never call it from the event
  /// handler: replies arrive on the thread that runs the handler.
  CommandReply call(const std::string& core_function, Bytes args,
                    std::chrono::milliseconds limit = std::chrono::seconds(10));

  /// Waits until `n` unsolicited events have been handled.
  bool wait_for_events(std::uint64_t n, std::chrono::milliseconds limit);
  std::uint64_t events() const;
  std::uint64_t last_event_seq() const;
  /// Events whose event_seq did not follow the previous one.
  std::uint64_t seq_gaps() const;

 private:
  void accept_loop();
  void serve(int fd);

  EndpointOptions opt_;
  EventHandler on_event_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::thread thread_;
  std::atomic<bool> stopping_{false};
  std::atomic<bool> host_gone_{false};

  mutable std::mutex mu_;
  std::condition_variable cv_;
  int conn_fd_ = -1;
  bool greeted_ = false;
  std::uint64_t next_cmd_seq_ = 1;
  std::map<std::uint64_t, std::optional<CommandReply>> pending_;
  std::uint64_t events_ = 0;
  std::uint64_t last_seq_ = 0;
  std::uint64_t gaps_ = 0;
  std::mutex write_mu_;
};

}  // namespace polyrdl::plugin

#endif  // POLYRDL_PLUGIN_ENDPOINT_HPP_
