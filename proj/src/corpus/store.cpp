#include "hfaid/corpus/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>

#include <spdlog/spdlog.h>

#include "hfaid/common/error.hpp"

namespace fs = std::filesystem;

namespace hfaid::corpus {
namespace {

void write_all(int fd, const std::string& data, const fs::path& path) {
  const char* p = data.data();
  std::size_t left = data.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("write to " + path.string() + " failed: " + std::strerror(errno));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
}

}  // namespace

std::unique_ptr<Store> open_store(const fs::path& dir, StoreOptions options) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + ": not a directory");
  } else {
    if (options.mode != OpenMode::read_write) throw IoError(dir.string() + ": store does not exist");
    fs::create_directories(dir, ec);
    if (ec) throw IoError(dir.string() + ": cannot create store directory: " + ec.message());
  }
  std::unique_ptr<Store> store(new Store(fs::absolute(dir).lexically_normal(), options));
  store->load();
  return store;
}

Store::Store(fs::path dir, StoreOptions options) : dir_(std::move(dir)), options_(options) {
  if (options_.mode != OpenMode::read_write) return;
  const auto lock_path = dir_ / kLockName;
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw IoError(lock_path.string() + ": " + std::strerror(errno));
  if (::flock(lock_fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw IoError(dir_.string() + ": store is locked by another writer");
  }
}

Store::~Store() {
  if (options_.mode == OpenMode::read_write) {
    try {
      if (dirty_) compact();
    } catch (const std::exception& e) {
      spdlog::error("store compaction failed: {}", e.what());
    }
  }
  if (log_fd_ >= 0) ::close(log_fd_);
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void Store::load() {
  const auto log_path = dir_ / kLogName;
  std::error_code ec;
  if (fs::exists(log_path, ec)) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) throw IoError(log_path.string() + ": unreadable");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const bool torn_tail = !content.empty() && content.back() != '\n';
    std::size_t pos = 0;
    std::size_t line_no = 0;
    std::size_t lines_seen = 0;
    while (pos < content.size()) {
      const std::size_t end = content.find('\n', pos);
      const bool last = end == std::string::npos;
      std::string line = content.substr(pos, last ? std::string::npos : end - pos);
      pos = last ? content.size() : end + 1;
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ++lines_seen;
      Json j;
      try {
        j = Json::parse(line);
      } catch (const Json::parse_error& e) {
        if (last && torn_tail) {
          // An unacknowledged append cut short by a crash.
          spdlog::warn("{}: dropping torn final line {}", log_path.string(), line_no);
          dirty_ = true;
          break;
        }
        throw FormatError(log_path.string() + ": corrupt record at line " + std::to_string(line_no) + ": " +
                          e.what());
      }
      const std::string id = j.is_object() && j.contains("id") && j["id"].is_string()
                                 ? j["id"].get<std::string>()
                                 : std::string("<unknown>");
      ImageRecord r;
      try {
        r = record_from_json(j);
        validate(r);
      } catch (const std::exception& e) {
        throw FormatError(log_path.string() + ": corrupt record " + id + " at line " + std::to_string(line_no) +
                          ": " + e.what());
      }
      records_[r.id] = std::move(r);
    }
    if (lines_seen > records_.size()) dirty_ = true;
  }
  for (const auto& [id, r] : records_) path_owner_.emplace(r.path, id);
  if (options_.mode == OpenMode::read_write) {
    log_fd_ = ::open(log_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (log_fd_ < 0) throw IoError(log_path.string() + ": " + std::strerror(errno));
  }
}

void Store::require_writable() const {
  if (options_.mode == OpenMode::read_only) throw Error("store " + dir_.string() + " is open read-only");
}

std::size_t Store::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

bool Store::contains(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return records_.count(id) != 0;
}

std::optional<ImageRecord> Store::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<ImageRecord> Store::records() const {
  std::shared_lock lock(mutex_);
  std::vector<ImageRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, r] : records_) out.push_back(r);
  return out;
}

std::vector<std::string> Store::ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  out.reserve(records_.size());
  for (const auto& [id, r] : records_) out.push_back(id);
  return out;
}

std::vector<std::string> Store::index_locked(const ImageRecord& r) {
  std::vector<std::string> warnings;
  auto [it, fresh] = path_owner_.emplace(r.path, r.id);
  if (!fresh && it->second != r.id) {
    std::string w = "path " + r.path + " already belongs to record " + it->second + "; also recorded for " + r.id;
    spdlog::warn("{}", w);
    warnings.push_back(std::move(w));
  }
  return warnings;
}

void Store::append_locked(const std::vector<const ImageRecord*>& recs) {
  dirty_ = true;
  if (options_.mode != OpenMode::read_write) return;
  std::string buf;
  for (const auto* r : recs) {
    buf += to_json(*r).dump();
    buf += '\n';
  }
  write_all(log_fd_, buf, dir_ / kLogName);
  if (options_.sync_writes && ::fsync(log_fd_) != 0) {
    throw IoError("fsync of store log failed: " + std::string(std::strerror(errno)));
  }
}

UpsertResult Store::upsert(ImageRecord record) {
  auto results = upsert_many({std::move(record)});
  return std::move(results.front());
}

std::vector<UpsertResult> Store::upsert_many(std::vector<ImageRecord> recs) {
  require_writable();
  for (const auto& r : recs) validate(r);
  std::unique_lock lock(mutex_);
  std::vector<UpsertResult> results;
  std::vector<const ImageRecord*> written;
  for (auto& r : recs) {
    UpsertResult res;
    res.id = r.id;
    auto existing = records_.find(r.id);
    res.inserted = existing == records_.end();
    if (!res.inserted && existing->second.path != r.path) {
      auto owner = path_owner_.find(existing->second.path);
      if (owner != path_owner_.end() && owner->second == r.id) path_owner_.erase(owner);
    }
    res.warnings = index_locked(r);
    auto& slot = records_[r.id];
    slot = std::move(r);
    written.push_back(&slot);
    results.push_back(std::move(res));
  }
  append_locked(written);
  return results;
}

bool Store::update(const std::string& id, const std::function<void(ImageRecord&)>& fn) {
  require_writable();
  std::unique_lock lock(mutex_);
  auto it = records_.find(id);
  if (it == records_.end()) return false;
  ImageRecord copy = it->second;
  fn(copy);
  validate(copy);
  if (copy.id != id) throw InvalidArgument("update may not change a record id");
  it->second = std::move(copy);
  append_locked({&it->second});
  return true;
}

std::size_t Store::update_all(const std::function<bool(ImageRecord&)>& fn) {
  require_writable();
  std::unique_lock lock(mutex_);
  std::vector<std::pair<std::string, ImageRecord>> changed;
  for (const auto& [id, r] : records_) {
    ImageRecord copy = r;
    if (fn(copy)) {
      validate(copy);
      changed.emplace_back(id, std::move(copy));
    }
  }
  std::vector<const ImageRecord*> written;
  for (auto& [id, r] : changed) {
    auto& slot = records_[id];
    slot = std::move(r);
    written.push_back(&slot);
  }
  if (!written.empty()) append_locked(written);
  return written.size();
}

void Store::compact() {
  if (options_.mode != OpenMode::read_write) return;
  std::unique_lock lock(mutex_);
  std::string buf;
  for (const auto& [id, r] : records_) {
    buf += to_json(r).dump();
    buf += '\n';
  }
  const auto log_path = dir_ / kLogName;
  auto tmp = log_path;
  tmp += ".compact";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw IoError(tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, buf, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::fsync(fd);
  ::close(fd);
  if (::rename(tmp.c_str(), log_path.c_str()) != 0) {
    throw IoError("cannot replace " + log_path.string() + ": " + std::strerror(errno));
  }
  if (log_fd_ >= 0) ::close(log_fd_);
  log_fd_ = ::open(log_path.c_str(), O_WRONLY | O_APPEND | O_CLOEXEC, 0644);
  if (log_fd_ < 0) throw IoError(log_path.string() + ": " + std::strerror(errno));
  dirty_ = false;
}

fs::path Store::resolve(const std::string& record_path) const {
  fs::path p(record_path);
  if (p.is_absolute()) return p;
  return (dir_ / p).lexically_normal();
}

std::string Store::relativize(const fs::path& file) const {
  return fs::absolute(file).lexically_normal().lexically_relative(dir_).generic_string();
}

}  // namespace hfaid::corpus
