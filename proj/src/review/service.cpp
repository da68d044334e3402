#include "hfaid/review/service.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <set>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "hfaid/common/error.hpp"
#include "hfaid/imgproc/codec.hpp"

namespace hfaid::review {

using corpus::Decision;
using corpus::ImageRecord;
using corpus::Stage;

std::string iso8601(Clock::time_point t) {
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t - secs).count();
  const std::time_t tt = Clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

Json Assignment::to_json() const {
  return Json{{"record_id", record_id},         {"image_url", image_url},
              {"scores", scores},               {"reviewer_id", reviewer_id},
              {"issued_at", iso8601(issued_at)}, {"expires_at", iso8601(expires_at)}};
}

ReviewQueue::ReviewQueue(corpus::Store& store, ServiceConfig cfg, std::function<Clock::time_point()> now)
    : store_(store), cfg_(std::move(cfg)), now_(std::move(now)) {}

std::string ReviewQueue::reviewer_for(const std::string& token) const {
  if (token.empty()) throw ReviewError(401, "missing reviewer token");
  if (cfg_.tokens.empty()) return token;
  auto it = cfg_.tokens.find(token);
  if (it == cfg_.tokens.end()) throw ReviewError(401, "unknown reviewer token");
  return it->second;
}

std::optional<Assignment> ReviewQueue::next_assignment(const std::string& reviewer) {
  if (reviewer.empty()) throw ReviewError(400, "reviewer id is empty");
  std::lock_guard lock(mutex_);
  const auto now = now_();

  const ImageRecord* best = nullptr;
  double best_score = 0.0;
  std::size_t best_count = 0;
  const auto records = store_.records();
  for (const auto& r : records) {
    if (!r.passed(Stage::aesthetic)) continue;
    if (is_final(review_status(r.review))) continue;
    if (std::any_of(r.review.begin(), r.review.end(), [&](const auto& v) { return v.reviewer_id == reviewer; })) continue;
    if (auto l = leases_.find({r.id, reviewer}); l != leases_.end() && l->second > now) continue;
    const std::size_t count = r.review.size();
    const double score = r.score(cfg_.aesthetic_metric).value_or(-HUGE_VAL);
    // Records come in ascending id order, so strict comparisons keep the
    // lowest id among equals.
    if (!best || count < best_count || (count == best_count && score > best_score)) {
      best = &r;
      best_count = count;
      best_score = score;
    }
  }
  if (!best) return std::nullopt;
  Assignment a;
  a.record_id = best->id;
  a.image_url = "/api/image/" + best->id;
  a.scores = best->scores;
  a.reviewer_id = reviewer;
  a.issued_at = now;
  a.expires_at = now + cfg_.lease_ttl;
  leases_[{a.record_id, reviewer}] = a.expires_at;
  return a;
}

ReviewStatus ReviewQueue::submit_verdict(const std::string& record_id, const std::string& reviewer, Decision decision,
                                         const std::optional<std::string>& note) {
  if (reviewer.empty()) throw ReviewError(400, "reviewer id is empty");
  std::lock_guard lock(mutex_);
  const auto rec = store_.get(record_id);
  if (!rec) throw ReviewError(404, "unknown record " + record_id);
  for (const auto& v : rec->review) {
    if (v.reviewer_id == reviewer) {
      throw ReviewError(409, "reviewer " + reviewer + " already judged record " + record_id);
    }
  }
  const auto now = now_();
  auto lease = leases_.find({record_id, reviewer});
  if (lease == leases_.end()) {
    throw ReviewError(409, "reviewer " + reviewer + " holds no assignment for record " + record_id);
  }
  if (lease->second <= now) {
    leases_.erase(lease);
    throw ReviewError(409, "assignment of record " + record_id + " to " + reviewer + " has expired");
  }
  corpus::ReviewVerdict v{record_id, reviewer, decision, note, iso8601(now)};
  ReviewStatus status = ReviewStatus::pending;
  store_.update(record_id, [&](ImageRecord& r) {
    r.review.push_back(v);
    status = review_status(r.review);
  });
  leases_.erase(lease);
  spdlog::info("verdict {} on {} by {} -> {}", corpus::decision_name(decision), record_id, reviewer, status_name(status));
  return status;
}

Json ReviewQueue::progress() const {
  std::map<std::string, std::size_t> counts{{"pending", 0}, {"approved", 0}, {"rejected", 0}, {"conflicted", 0}};
  std::map<std::string, std::size_t> per_reviewer;
  std::size_t total = 0;
  for (const auto& r : store_.records()) {
    if (!r.passed(Stage::aesthetic)) continue;
    ++total;
    ++counts[std::string(status_name(review_status(r.review)))];
    for (const auto& v : r.review) ++per_reviewer[v.reviewer_id];
  }
  Json j = counts;
  j["total"] = total;
  j["reviewers"] = per_reviewer;
  return j;
}

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& msg) {
  send_json(res, status, Json{{"error", msg}});
}

std::string token_of(const httplib::Request& req) {
  const auto auth = req.get_header_value("Authorization");
  if (auth.rfind("Bearer ", 0) == 0) return auth.substr(7);
  auto t = req.get_header_value("X-Reviewer-Token");
  if (!t.empty()) return t;
  return req.get_param_value("reviewer");
}

}  // namespace

ReviewServer::ReviewServer(corpus::Store& store, ServiceConfig cfg)
    : store_(store), queue_(store, std::move(cfg)), server_(std::make_unique<httplib::Server>()) {
  // Plain SO_REUSEADDR: the library default also sets SO_REUSEPORT, which
  // would let a second server bind the same port.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  routes();
}

ReviewServer::~ReviewServer() { stop(); }

void ReviewServer::routes() {
  auto guarded = [](auto fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const ReviewError& e) {
        send_error(res, e.status(), e.what());
      } catch (const Json::exception& e) {
        send_error(res, 400, std::string("bad request: ") + e.what());
      } catch (const InvalidArgument& e) {
        send_error(res, 400, e.what());
      } catch (const FormatError& e) {
        send_error(res, 400, e.what());
      } catch (const std::exception& e) {
        spdlog::error("review service: {}", e.what());
        send_error(res, 500, e.what());
      }
    };
  };

  server_->Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, Json{{"status", "ok"}});
  });

  server_->Get("/api/assignment", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto reviewer = queue_.reviewer_for(token_of(req));
                 const auto a = queue_.next_assignment(reviewer);
                 if (!a) {
                   res.status = 204;
                   return;
                 }
                 send_json(res, 200, a->to_json());
               }));

  server_->Post("/api/verdict", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto reviewer = queue_.reviewer_for(token_of(req));
                  const Json body = Json::parse(req.body);
                  if (!body.is_object()) throw ReviewError(400, "body must be a JSON object");
                  const auto id = body.at("record_id").get<std::string>();
                  const auto decision = corpus::parse_decision(body.at("decision").get<std::string>());
                  std::optional<std::string> note;
                  if (body.contains("note") && !body["note"].is_null()) note = body["note"].get<std::string>();
                  const auto status = queue_.submit_verdict(id, reviewer, decision, note);
                  send_json(res, 200, Json{{"record_id", id}, {"status", std::string(status_name(status))}});
                }));

  server_->Get("/api/progress", guarded([this](const httplib::Request&, httplib::Response& res) {
                 send_json(res, 200, queue_.progress());
               }));

  server_->Get(R"(/api/image/([0-9a-f]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto id = req.matches[1].str();
                 const auto r = store_.get(id);
                 if (!r) throw ReviewError(404, "unknown record " + id);
                 std::vector<std::uint8_t> bytes;
                 try {
                   bytes = imgproc::read_file_bytes(store_.resolve(r->path));
                 } catch (const Error& e) {
                   throw ReviewError(404, e.what());
                 }
                 const auto mime = imgproc::mime_type(imgproc::sniff_format(bytes));
                 res.status = 200;
                 res.set_content(std::string(bytes.begin(), bytes.end()), std::string(mime));
               }));

  if (queue_.config().static_dir) {
    if (!server_->set_mount_point("/", queue_.config().static_dir->string())) {
      throw IoError("static directory not found: " + queue_.config().static_dir->string());
    }
  }
}

void ReviewServer::bind() {
  if (bound_) return;
  const auto& cfg = queue_.config();
  if (cfg.port == 0) {
    port_ = server_->bind_to_any_port(cfg.host);
    if (port_ < 0) throw IoError("cannot bind " + cfg.host + " to any port");
  } else {
    if (!server_->bind_to_port(cfg.host, cfg.port)) {
      throw IoError("cannot bind " + cfg.host + ":" + std::to_string(cfg.port) + " (address in use?)");
    }
    port_ = cfg.port;
  }
  bound_ = true;
}

void ReviewServer::run() {
  bind();
  spdlog::info("review service listening on {}:{}", queue_.config().host, port_);
  server_->listen_after_bind();
}

void ReviewServer::start() {
  bind();
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void ReviewServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace hfaid::review
