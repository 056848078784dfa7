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

#ifndef POLYRDL_PLUGIN_SESSION_HPP_
#define POLYRDL_PLUGIN_SESSION_HPP_

#include <sys/types.h>

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/plugin/descriptor.hpp"
#include "polyrdl/plugin/protocol.hpp"

namespace polyrdl::plugin {

inline constexpr std::size_t kDefaultQueueCap = 10000;

/// Host side of one live plug-in connection (after the HELLO exchange).
///
/// Events are queued and written by a dedicated thread, so dispatch never
/// waits on the plug-in. When more than `queue_cap` events are waiting the
/// oldest is dropped; replies to commands are never dropped. Commands are
/// read on a second thread and executed in arrival order.
class PluginSession {
 public:
  PluginSession(PluginDescriptor d, std::string host_replica, int fd, CommandExecutor& exec,
                std::size_t queue_cap = kDefaultQueueCap, pid_t child = -1);
  ~PluginSession();
  PluginSession(const PluginSession&) = delete;
  PluginSession& operator=(const PluginSession&) = delete;

  void start();
  /// Closes the connection and, for a spawned plug-in, ends the process.
  void stop();

  /// Queues an event if the plug-in subscribes to `core_function`.
  void dispatch(std::string_view core_function, const Update* update, const Bytes& result_view);

  const PluginDescriptor& descriptor() const { return desc_; }
  bool alive() const { return alive_; }
  std::uint64_t events_sent() const { return events_sent_; }
  std::uint64_t dropped() const { return dropped_; }
  std::uint64_t commands() const { return commands_; }
  std::size_t queued() const;
  pid_t child() const { return child_; }

 private:
  struct Outgoing {
    bool droppable = true;
    bool is_error = false;
    cdf::PluginEvent event;
    cdf::PluginError error;
  };

  void push(Outgoing o);
  void writer_loop();
  void reader_loop();
  void handle(const cdf::PluginCommand& cmd);

  PluginDescriptor desc_;
  std::string host_replica_;
  int fd_;
  CommandExecutor& exec_;
  std::size_t cap_;
  pid_t child_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Outgoing> queue_;
  std::size_t droppable_queued_ = 0;
  bool stopping_ = false;
  std::atomic<bool> alive_{true};
  std::atomic<std::uint64_t> events_sent_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> commands_{0};
  std::uint64_t next_event_seq_ = 1;
  std::uint64_t last_cmd_seq_ = 0;
  std::thread writer_;
  std::thread reader_;
  std::once_flag stop_once_;
};

/// Ends a spawned plug-in: SIGTERM, then SIGKILL if it lingers.
void reap_child(pid_t pid);

}  // namespace polyrdl::plugin

#endif  // POLYRDL_PLUGIN_SESSION_HPP_
