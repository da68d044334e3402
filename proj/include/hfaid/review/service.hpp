#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "hfaid/common/json_util.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/review/protocol.hpp"

namespace httplib {
class Server;
}

namespace hfaid::review {

using Clock = std::chrono::system_clock;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::chrono::seconds lease_ttl{600};
  // Bearer token -> reviewer name. Empty: the token itself is the name.
  std::map<std::string, std::string> tokens;
  std::string aesthetic_metric = "aesthetic";
  std::optional<std::filesystem::path> static_dir;  // served at /
};

struct Assignment {
  std::string record_id;
  std::string image_url;
  std::map<std::string, double> scores;
  std::string reviewer_id;
  Clock::time_point issued_at;
  Clock::time_point expires_at;

  Json to_json() const;
};

// Errors carry the HTTP status they map to.
class ReviewError : public std::runtime_error {
 public:
  ReviewError(int status, const std::string& msg) : std::runtime_error(msg), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Assignment and verdict bookkeeping over the stage-3 survivors of a store.
// Thread-safe; verdicts are written through the store before returning.
class ReviewQueue {
 public:
  ReviewQueue(corpus::Store& store, ServiceConfig cfg, std::function<Clock::time_point()> now = Clock::now);

  // Highest-priority open record (fewest verdicts, then best aesthetic
  // score, then lowest id) that the reviewer has neither judged nor holds
  // a live lease on. Approved and rejected records are not offered.
  std::optional<Assignment> next_assignment(const std::string& reviewer);

  // Requires a live lease of this reviewer on the record. Duplicate
  // (record, reviewer) verdicts and expired leases are 409s, unknown
  // records 404.
  ReviewStatus submit_verdict(const std::string& record_id, const std::string& reviewer, corpus::Decision decision,
                              const std::optional<std::string>& note);

  Json progress() const;

  // Maps a bearer token to a reviewer name; throws ReviewError 401.
  std::string reviewer_for(const std::string& token) const;

  const ServiceConfig& config() const { return cfg_; }

 private:
  corpus::Store& store_;
  ServiceConfig cfg_;
  std::function<Clock::time_point()> now_;
  mutable std::mutex mutex_;
  // (record, reviewer) -> lease expiry
  std::map<std::pair<std::string, std::string>, Clock::time_point> leases_;
};

std::string iso8601(Clock::time_point t);

// HTTP front end:
//   GET  /api/assignment?reviewer=<token>  200 assignment | 204
//   POST /api/verdict {record_id, decision, note?}, token in
//        "Authorization: Bearer", "X-Reviewer-Token" or ?reviewer=
//   GET  /api/progress, GET /api/image/<id>, GET /api/health
class ReviewServer {
 public:
  ReviewServer(corpus::Store& store, ServiceConfig cfg);
  ~ReviewServer();

  // Binds the listening socket; throws IoError if the address is taken.
  void bind();
  int port() const { return port_; }
  // Serves on the calling thread until stop().
  void run();
  // bind() (if needed) and serve on a background thread.
  void start();
  void stop();

  ReviewQueue& queue() { return queue_; }

 private:
  void routes();

  corpus::Store& store_;
  ReviewQueue queue_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
  bool bound_ = false;
};

}  // namespace hfaid::review
