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

#include "polyrdl/persist/storage.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <boost/crc.hpp>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <regex>

#include "polyrdl/cdf/codec.hpp"
#include "polyrdl/cdf/wire.hpp"
#include "polyrdl/core/error.hpp"

namespace fs = std::filesystem;

namespace polyrdl::persist {

namespace {

constexpr std::uint8_t kSnapshotMagic[4] = {'P', 'R', 'S', '1'};
constexpr std::uint8_t kCheckpointMagic[4] = {'P', 'R', 'C', '1'};
constexpr std::uint64_t kBatchedSyncEvery = 64;

[[noreturn]] void io_error(const std::string& what) { throw Error(Errc::kIo, what + ": " + std::strerror(errno)); }

void write_all(int fd, const std::uint8_t* p, std::size_t n, const std::string& what) {
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0 && errno == EINTR) continue;
    if (w <= 0) io_error(what);
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void fsync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

// Appends the trailing checksum.
Bytes seal(cdf::Writer& w) {
  Bytes b = w.take();
  const std::uint32_t crc = crc32c(b);
  cdf::Writer tail(b);
  tail.u32(crc);
  return b;
}

// Verifies and strips the trailing checksum.
std::span<const std::uint8_t> unseal(std::span<const std::uint8_t> in, const std::uint8_t (&magic)[4],
                                     const char* what) {
  if (in.size() < 8 || std::memcmp(in.data(), magic, 4) != 0) {
    throw Error(Errc::kCorruption, std::string(what) + ": bad header");
  }
  const auto body = in.first(in.size() - 4);
  cdf::Reader r(in.last(4));
  if (r.u32() != crc32c(body)) throw Error(Errc::kCorruption, std::string(what) + ": checksum mismatch");
  return body.subspan(4);
}

}  // namespace

std::uint32_t crc32c(std::span<const std::uint8_t> data) {
  boost::crc_optimal<32, 0x1EDC6F41, 0xFFFFFFFF, 0xFFFFFFFF, true, true> crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

// --- WAL -------------------------------------------------------------------

WalScan scan_wal(const fs::path& path) {
  WalScan scan;
  if (!fs::exists(path)) return scan;
  const Bytes data = read_file(path);
  std::span<const std::uint8_t> rest(data);
  std::uint64_t off = 0;
  while (!rest.empty()) {
    if (rest.size() < 8) break;  // torn header
    cdf::Reader hdr(rest.first(8));
    const std::uint32_t len = hdr.u32();
    const std::uint32_t crc = hdr.u32();
    if (rest.size() - 8 < len) break;  // torn body
    const auto body = rest.subspan(8, len);
    const bool last = rest.size() - 8 == len;
    if (crc32c(body) != crc) {
      if (last) break;
      throw Error(Errc::kCorruption, "wal record at offset " + std::to_string(off) + ": checksum mismatch");
    }
    try {
      scan.updates.push_back(cdf::decode_update(body));
    } catch (const cdf::DecodeError& e) {
      throw Error(Errc::kCorruption, "wal record at offset " + std::to_string(off) + ": " + e.what());
    }
    off += 8 + len;
    scan.record_ends.push_back(off);
    rest = rest.subspan(8 + len);
  }
  scan.valid_bytes = off;
  scan.torn_bytes = data.size() - off;
  return scan;
}

WalWriter::WalWriter(const fs::path& path, FsyncPolicy policy) : policy_(policy) {
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) io_error("open " + path.string());
  struct stat st {};
  ::fstat(fd_, &st);
  size_ = static_cast<std::uint64_t>(st.st_size);
}

WalWriter::~WalWriter() {
  if (fd_ >= 0) {
    if (unsynced_ > 0 && policy_ != FsyncPolicy::kNone) ::fdatasync(fd_);
    ::close(fd_);
  }
}

WalWriter::WalWriter(WalWriter&& o) noexcept { *this = std::move(o); }

WalWriter& WalWriter::operator=(WalWriter&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(o.fd_, -1);
    policy_ = o.policy_;
    size_ = o.size_;
    records_ = o.records_;
    unsynced_ = o.unsynced_;
  }
  return *this;
}

void WalWriter::append(const Update& u) {
  if (fd_ < 0) throw Error(Errc::kIo, "wal is not open");
  Bytes rec;
  cdf::Writer w(rec);
  w.u32(0);
  w.u32(0);
  cdf::encode_update(w, u);
  const std::uint32_t len = static_cast<std::uint32_t>(rec.size() - 8);
  const std::uint32_t crc = crc32c(std::span<const std::uint8_t>(rec).subspan(8));
  for (int i = 0; i < 4; ++i) {
    rec[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(len >> (24 - 8 * i));
    rec[static_cast<std::size_t>(4 + i)] = static_cast<std::uint8_t>(crc >> (24 - 8 * i));
  }
  write_all(fd_, rec.data(), rec.size(), "wal append");
  size_ += rec.size();
  ++records_;
  ++unsynced_;
  if (policy_ == FsyncPolicy::kEveryRecord || (policy_ == FsyncPolicy::kBatched && unsynced_ >= kBatchedSyncEvery)) {
    sync();
  }
}

void WalWriter::sync() {
  if (fd_ < 0 || unsynced_ == 0) return;
  if (::fdatasync(fd_) != 0) io_error("wal fsync");
  unsynced_ = 0;
}

// --- images ------------------------------------------------------------------

Bytes encode_image(const ReplicaImage& image) {
  cdf::Writer w;
  w.raw(kSnapshotMagic);
  w.str(image.replica_id);
  w.u64(image.epoch);
  w.u64(image.clock);
  w.u64(image.next_seq);
  const auto& origins = image.known.origins();
  w.count(origins.size());
  for (const auto& [rid, o] : origins) {
    w.str(rid);
    w.u64(o.contiguous);
    w.count(o.extra.size());
    for (std::uint64_t s : o.extra) w.u64(s);
  }
  w.bytes(image.objects);
  w.count(image.log.size());
  for (const auto& u : image.log) w.bytes(cdf::encode_update(u));
  return seal(w);
}

ReplicaImage decode_image(std::span<const std::uint8_t> in) {
  const auto body = unseal(in, kSnapshotMagic, "snapshot");
  try {
    cdf::Reader r(body);
    ReplicaImage img;
    img.replica_id = r.str();
    img.epoch = r.u64();
    img.clock = r.u64();
    img.next_seq = r.u64();
    for (std::size_t n = r.count(12); n > 0; --n) {
      std::string rid = r.str();
      VersionVector::Origin o;
      o.contiguous = r.u64();
      for (std::size_t m = r.count(8); m > 0; --m) o.extra.insert(r.u64());
      img.known.set_origin(rid, std::move(o));
    }
    img.objects = r.bytes();
    cdf::decode_state(img.objects);
    for (std::size_t n = r.count(4); n > 0; --n) img.log.push_back(cdf::decode_update(r.bytes()));
    r.expect_done();
    return img;
  } catch (const cdf::DecodeError& e) {
    throw Error(Errc::kCorruption, std::string("snapshot: ") + e.what());
  }
}

Bytes encode_checkpoint(const Checkpoint& c) {
  cdf::Writer w;
  w.raw(kCheckpointMagic);
  w.str(c.label);
  w.str(c.replica_id);
  w.u64(c.epoch);
  w.u64(c.clock);
  w.count(c.version_vector.size());
  for (const auto& [rid, seq] : c.version_vector) {
    w.str(rid);
    w.u64(seq);
  }
  w.bytes(c.body);
  return seal(w);
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> in) {
  const auto body = unseal(in, kCheckpointMagic, "checkpoint");
  try {
    cdf::Reader r(body);
    Checkpoint c;
    c.label = r.str();
    c.replica_id = r.str();
    c.epoch = r.u64();
    c.clock = r.u64();
    for (std::size_t n = r.count(12); n > 0; --n) {
      std::string rid = r.str();
      const std::uint64_t seq = r.u64();
      c.version_vector.emplace_back(std::move(rid), seq);
    }
    c.body = r.bytes();
    cdf::decode_state(c.body);
    r.expect_done();
    return c;
  } catch (const cdf::DecodeError& e) {
    throw Error(Errc::kCorruption, std::string("checkpoint: ") + e.what());
  }
}

bool valid_label(const std::string& label) {
  static const std::regex kLabel("[A-Za-z0-9._-]{1,128}");
  return std::regex_match(label, kLabel) && label != "." && label != "..";
}

void write_checkpoint(const fs::path& dir, const Checkpoint& c) {
  if (!valid_label(c.label)) throw Error(Errc::kInvalidArgument, "bad checkpoint label: " + c.label);
  const fs::path cdir = dir / "checkpoints";
  fs::create_directories(cdir);
  const fs::path path = cdir / (c.label + ".bin");
  if (fs::exists(path)) throw Error(Errc::kDuplicateLabel, "checkpoint exists: " + c.label);
  write_file_atomic(path, encode_checkpoint(c), true);
}

Checkpoint read_checkpoint(const fs::path& dir, const std::string& label) {
  if (!valid_label(label)) throw Error(Errc::kUnknownCheckpoint, "no checkpoint " + label);
  const fs::path path = dir / "checkpoints" / (label + ".bin");
  if (!fs::exists(path)) throw Error(Errc::kUnknownCheckpoint, "no checkpoint " + label);
  return decode_checkpoint(read_file(path));
}

std::vector<std::string> list_checkpoints(const fs::path& dir) {
  std::vector<std::string> out;
  const fs::path cdir = dir / "checkpoints";
  if (!fs::exists(cdir)) return out;
  for (const auto& e : fs::directory_iterator(cdir)) {
    if (e.path().extension() == ".bin") out.push_back(e.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// --- files -------------------------------------------------------------------

void write_file_atomic(const fs::path& path, std::span<const std::uint8_t> data, bool durable) {
  const fs::path tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error("open " + tmp.string());
  try {
    write_all(fd, data.data(), data.size(), "write " + tmp.string());
    if (durable && ::fsync(fd) != 0) io_error("fsync " + tmp.string());
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) io_error("rename " + tmp.string());
  if (durable) fsync_dir(path.parent_path());
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// --- Storage -----------------------------------------------------------------

Storage::Storage(fs::path dir, FsyncPolicy policy) : dir_(std::move(dir)), policy_(policy) {
  fs::create_directories(dir_);
}

fs::path Storage::snapshot_path(std::uint64_t id) const { return dir_ / ("snap-" + std::to_string(id) + ".bin"); }

std::vector<std::uint64_t> Storage::snapshot_ids() const {
  static const std::regex kName("snap-([0-9]{1,19})\\.bin");
  std::vector<std::uint64_t> ids;
  for (const auto& e : fs::directory_iterator(dir_)) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, kName)) ids.push_back(std::stoull(m[1].str()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

Replica Storage::recover(const std::string& replica_id, ReplicaConfig config) {
  info_ = RecoveryInfo{};
  for (const auto& e : fs::directory_iterator(dir_)) {
    if (e.path().extension() == ".tmp") fs::remove(e.path());
  }

  std::optional<ReplicaImage> image;
  const auto ids = snapshot_ids();
  for (auto it = ids.rbegin(); it != ids.rend() && !image; ++it) {
    try {
      ReplicaImage img = decode_image(read_file(snapshot_path(*it)));
      if (img.replica_id != replica_id) throw Error(Errc::kCorruption, "snapshot of another replica");
      image = std::move(img);
      info_.snapshot = *it;
    } catch (const Error&) {
      info_.bad_snapshots.push_back(*it);
    }
  }

  WalScan scan;
  try {
    scan = scan_wal(wal_path());
  } catch (const Error& e) {
    if (!image && !ids.empty()) throw Error(Errc::kUnrecoverable, std::string("snapshots and wal damaged: ") + e.what());
    throw;
  }
  if (scan.torn_bytes > 0) {
    fs::resize_file(wal_path(), scan.valid_bytes);
    info_.torn_bytes = scan.torn_bytes;
  }

  Replica r = image ? Replica::from_image(*image, config) : Replica(replica_id, config);
  for (const auto& u : scan.updates) {
    r.apply_update(u);
    ++info_.replayed;
  }
  wal_ = WalWriter(wal_path(), policy_);
  wal_mark_ = 0;
  return r;
}

void Storage::append(const Update& u) {
  if (!wal_.is_open()) wal_ = WalWriter(wal_path(), policy_);
  wal_.append(u);
}

std::uint64_t Storage::write_snapshot(const Replica& r) {
  wal_.sync();
  const auto ids = snapshot_ids();
  const std::uint64_t id = ids.empty() ? 1 : ids.back() + 1;
  write_file_atomic(snapshot_path(id), encode_image(r.image()), policy_ != FsyncPolicy::kNone);

  // Keep the previous snapshot and the WAL records since it, so a damaged
  // newest snapshot can still be recovered from.
  const std::uint64_t size = wal_.size();
  if (wal_mark_ > 0) {
    const Bytes data = read_file(wal_path());
    const auto tail = std::span<const std::uint8_t>(data).subspan(std::min<std::size_t>(wal_mark_, data.size()));
    wal_ = WalWriter();
    write_file_atomic(wal_path(), tail, policy_ != FsyncPolicy::kNone);
    wal_ = WalWriter(wal_path(), policy_);
    wal_mark_ = size - (data.size() - tail.size());
  } else {
    wal_mark_ = size;
  }
  for (std::uint64_t old : ids) {
    if (old < ids.back()) fs::remove(snapshot_path(old));
  }
  return id;
}

void Storage::checkpoint(const std::string& label, const Replica& r) {
  Checkpoint c{label, r.id(), r.epoch(), r.clock(), r.known().entries(), r.encode_state()};
  write_checkpoint(dir_, c);
}

}  // namespace polyrdl::persist
