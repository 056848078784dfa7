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

#include "polyrdl/plugin/manager.hpp"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "polyrdl/cdf/frame.hpp"
#include "polyrdl/core/error.hpp"
#include "polyrdl/sync/tcp.hpp"

extern char** environ;

namespace fs = std::filesystem;

namespace polyrdl::plugin {

namespace {

[[noreturn]] void fail(IntegrationCode code, const std::string& what) { throw IntegrationFailure(code, what); }

/// True when nothing else holds the port.
bool port_free(std::uint16_t port) {
  try {
    const int fd = sync::tcp_listen({"127.0.0.1", port}, 1);
    sync::close_fd(fd);
    return true;
  } catch (const Error&) {
    return false;
  }
}

fs::path locate(const PluginDescriptor& d, const fs::path& meta) {
  fs::path exe = d.executable;
  if (exe.is_relative()) exe = meta.parent_path() / exe;
  std::error_code ec;
  if (!fs::is_regular_file(exe, ec) || ::access(exe.c_str(), X_OK) != 0) {
    fail(IntegrationCode::kLocateError, "no runnable executable at " + exe.string());
  }
  return exe;
}

pid_t spawn(const fs::path& exe, const PluginDescriptor& d, const std::optional<fs::path>& data_dir) {
  std::vector<std::string> args = {exe.string(), "--id", d.plugin_id, "--listen", std::to_string(d.address)};
  if (data_dir) {
    args.push_back("--data-dir");
    args.push_back(data_dir->string());
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  posix_spawn_file_actions_t fa;
  posix_spawn_file_actions_init(&fa);
  posix_spawn_file_actions_addopen(&fa, 0, "/dev/null", O_RDONLY, 0);
  pid_t pid = -1;
  const int rc = posix_spawn(&pid, exe.c_str(), &fa, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&fa);
  if (rc != 0) fail(IntegrationCode::kDeployError, "spawn " + exe.string() + ": " + std::strerror(rc));
  return pid;
}

int connect_with_retry(std::uint16_t port, std::chrono::milliseconds limit, pid_t child) {
  const auto end = std::chrono::steady_clock::now() + limit;
  auto pause = std::chrono::milliseconds(10);
  for (;;) {
    const int fd = sync::tcp_connect({"127.0.0.1", port});
    if (fd >= 0) return fd;
    if (child > 0 && ::waitpid(child, nullptr, WNOHANG) == child) {
      fail(IntegrationCode::kDeployError, "plug-in process exited before listening");
    }
    if (std::chrono::steady_clock::now() >= end) {
      fail(IntegrationCode::kDeployError, "nothing listening on port " + std::to_string(port));
    }
    std::this_thread::sleep_for(pause);
    pause = std::min(pause * 2, std::chrono::milliseconds(200));
  }
}

/// Reads exactly one frame or gives up at the deadline.
std::optional<cdf::Frame> read_frame(int fd, std::chrono::milliseconds limit) {
  cdf::FrameBuffer buf;
  const auto end = std::chrono::steady_clock::now() + limit;
  std::uint8_t chunk[4096];
  for (;;) {
    if (auto f = buf.next()) return f;
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(end - std::chrono::steady_clock::now());
    if (left.count() <= 0) return std::nullopt;
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) return std::nullopt;
    // Byte at a time: whatever follows the HELLO belongs to the session.
    const ssize_t n = ::recv(fd, chunk, 1, 0);
    if (n <= 0) return std::nullopt;
    buf.feed(std::span<const std::uint8_t>(chunk, static_cast<std::size_t>(n)));
  }
}

void handshake(int fd, const PluginDescriptor& d, std::chrono::milliseconds limit) {
  const Bytes hello = cdf::encode_frame(cdf::MsgType::kPluginHello, cdf::encode_hello({d.plugin_id, d.schema_version}));
  if (!sync::send_all(fd, hello)) fail(IntegrationCode::kDeployError, "connection lost before HELLO");
  std::optional<cdf::Frame> f;
  try {
    f = read_frame(fd, limit);
  } catch (const cdf::DecodeError& e) {
    fail(IntegrationCode::kHelloMismatch, std::string("bad HELLO frame: ") + e.what());
  }
  if (!f) fail(IntegrationCode::kHelloMismatch, "no HELLO from plug-in");
  if (f->type != cdf::MsgType::kPluginHello) fail(IntegrationCode::kHelloMismatch, "first frame is not HELLO");
  cdf::PluginHello got;
  try {
    got = cdf::decode_hello(f->payload);
  } catch (const cdf::DecodeError& e) {
    fail(IntegrationCode::kHelloMismatch, std::string("bad HELLO: ") + e.what());
  }
  if (got.plugin_id != d.plugin_id || got.schema_version != d.schema_version) {
    fail(IntegrationCode::kHelloMismatch, "plug-in answered as " + got.plugin_id + " v" +
                                              std::to_string(got.schema_version) + ", expected " + d.plugin_id +
                                              " v" + std::to_string(d.schema_version));
  }
}

}  // namespace

PluginManager::PluginManager(CommandExecutor& exec, ManagerOptions opt) : exec_(exec), opt_(std::move(opt)) {}

PluginManager::~PluginManager() { shutdown(); }

IntegrationReport PluginManager::integrate(const std::vector<std::string>& plugin_ids,
                                           const std::vector<fs::path>& metadata_paths) {
  if (plugin_ids.size() != metadata_paths.size()) {
    throw Error(Errc::kInvalidArgument, "plug-in ids and metadata paths differ in length");
  }
  IntegrationReport report;
  for (std::size_t i = 0; i < plugin_ids.size(); ++i) report.push_back(integrate_one(plugin_ids[i], metadata_paths[i]));
  return report;
}

IntegrationResult PluginManager::integrate_one(const std::string& id, const fs::path& meta) {
  IntegrationResult res{id, IntegrationCode::kOk, {}};
  pid_t child = -1;
  int fd = -1;
  try {
    // consult
    std::ifstream in(meta);
    if (!in) fail(IntegrationCode::kMetadataMissing, "cannot read " + meta.string());
    std::stringstream text;
    text << in.rdbuf();
    PluginDescriptor d = parse_descriptor(text.str());
    if (d.plugin_id != id) fail(IntegrationCode::kIdMismatch, "metadata describes " + d.plugin_id);

    // generate, then validate
    const WireSchema schema = generate_schema(d);
    validate_schema(d, schema);

    {
      std::lock_guard lock(mu_);
      for (const auto& s : sessions_) {
        if (s->descriptor().plugin_id == id) fail(IntegrationCode::kDuplicateId, id + " is already integrated");
        if (s->descriptor().address == d.address) {
          fail(IntegrationCode::kPortConflict, "port " + std::to_string(d.address) + " belongs to " +
                                                   s->descriptor().plugin_id);
        }
      }
    }

    // locate and deploy
    if (d.external()) {
      fd = connect_with_retry(d.address, opt_.connect_timeout, -1);
    } else {
      const fs::path exe = locate(d, meta);
      if (!port_free(d.address)) fail(IntegrationCode::kPortConflict, "port " + std::to_string(d.address) + " is taken");
      child = spawn(exe, d, opt_.data_dir);
      fd = connect_with_retry(d.address, opt_.connect_timeout, child);
    }
    handshake(fd, d, opt_.hello_timeout);

    // interact
    auto session = std::make_shared<PluginSession>(d, opt_.host_replica, fd, exec_, opt_.queue_cap, child);
    fd = -1;
    child = -1;
    session->start();
    std::lock_guard lock(mu_);
    sessions_.push_back(std::move(session));
  } catch (const IntegrationFailure& e) {
    res.code = e.code();
    res.message = e.what();
  } catch (const std::exception& e) {
    res.code = IntegrationCode::kDeployError;
    res.message = e.what();
  }
  sync::close_fd(fd);
  reap_child(child);
  return res;
}

void PluginManager::dispatch(std::string_view core_function, const Update* update, const Bytes& result_view) {
  std::lock_guard lock(mu_);
  for (const auto& s : sessions_) s->dispatch(core_function, update, result_view);
}

std::vector<std::string> PluginManager::deployed() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& s : sessions_) out.push_back(s->descriptor().plugin_id);
  return out;
}

std::shared_ptr<PluginSession> PluginManager::session(const std::string& plugin_id) const {
  std::lock_guard lock(mu_);
  for (const auto& s : sessions_) {
    if (s->descriptor().plugin_id == plugin_id) return s;
  }
  return nullptr;
}

void PluginManager::shutdown() {
  std::vector<std::shared_ptr<PluginSession>> all;
  {
    std::lock_guard lock(mu_);
    all.swap(sessions_);
  }
  for (auto& s : all) s->stop();
}

}  // namespace polyrdl::plugin
