#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "hfaid/corpus/record.hpp"

namespace hfaid::corpus {

enum class OpenMode {
  read_write,  // takes the writer lock; mutations are logged to disk
  read_only,   // no lock; mutations throw
  ephemeral,   // no lock; mutations live in memory only (dry runs)
};

struct StoreOptions {
  OpenMode mode = OpenMode::read_write;
  // fsync after every logged mutation; the review service turns this on so
  // acknowledged verdicts survive a crash.
  bool sync_writes = false;
};

struct UpsertResult {
  std::string id;
  bool inserted = false;
  std::vector<std::string> warnings;
};

// Image-record store backed by a JSON-Lines log (`records.jsonl`) inside a
// directory. Every mutation appends the full record; opening replays the
// log (last write wins) and closing compacts it to one line per record,
// sorted by id. One writer per directory, enforced with flock on
// `store.lock`. Within a process, reads take a shared lock and mutations an
// exclusive one.
class Store {
 public:
  static constexpr const char* kLogName = "records.jsonl";
  static constexpr const char* kLockName = "store.lock";

  Store(const Store&) = delete;
  Store& operator=(const Store&) = delete;
  ~Store();

  const std::filesystem::path& dir() const { return dir_; }
  OpenMode mode() const { return options_.mode; }

  std::size_t size() const;
  bool contains(const std::string& id) const;
  std::optional<ImageRecord> get(const std::string& id) const;
  // All records, ascending by id.
  std::vector<ImageRecord> records() const;
  std::vector<std::string> ids() const;

  UpsertResult upsert(ImageRecord record);
  // Validates every record first; nothing is written if any is invalid.
  std::vector<UpsertResult> upsert_many(std::vector<ImageRecord> records);

  // Atomic read-modify-write of one record. Returns false if id is unknown.
  bool update(const std::string& id, const std::function<void(ImageRecord&)>& fn);

  // Applies fn to every record in id order and logs those it changed.
  // fn returns true when it modified the record.
  std::size_t update_all(const std::function<bool(ImageRecord&)>& fn);

  // Rewrites the log as one line per record. Called on destruction.
  void compact();

  // Maps a record path to a filesystem path and back.
  std::filesystem::path resolve(const std::string& record_path) const;
  std::string relativize(const std::filesystem::path& file) const;

 private:
  friend std::unique_ptr<Store> open_store(const std::filesystem::path&, StoreOptions);
  Store(std::filesystem::path dir, StoreOptions options);

  void load();
  void append_locked(const std::vector<const ImageRecord*>& recs);
  void require_writable() const;
  std::vector<std::string> index_locked(const ImageRecord& r);

  std::filesystem::path dir_;
  StoreOptions options_;
  int lock_fd_ = -1;
  int log_fd_ = -1;
  bool dirty_ = false;
  mutable std::shared_mutex mutex_;
  std::map<std::string, ImageRecord> records_;
  std::map<std::string, std::string> path_owner_;
};

// Opens (creating if needed) the store at `dir`. Throws IoError when the
// path is not a directory, cannot be created, or is locked by another
// writer; FormatError naming the record id (or line) of a corrupt entry.
std::unique_ptr<Store> open_store(const std::filesystem::path& dir, StoreOptions options = {});

}  // namespace hfaid::corpus
