#include "hfaid/cli/global_config.hpp"

#include <set>

#include "hfaid/common/error.hpp"

namespace hfaid::cli {
namespace fs = std::filesystem;

namespace {

fs::path resolve_path(const Json& v, const fs::path& base) {
  fs::path p = v.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

}  // namespace

GlobalConfig GlobalConfig::from_json(const Json& j, const fs::path& base_dir) {
  static const std::set<std::string> known{"store",      "seed",        "workers",         "pipeline",
                                           "degradation", "ropo",       "schedule",        "niqe_model",
                                           "brisque_weights", "scorers", "review"};
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) throw InvalidArgument("config: unknown key " + k);
  }
  GlobalConfig c;
  try {
    if (j.contains("store")) c.store = resolve_path(j["store"], base_dir);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    if (j.contains("pipeline")) c.pipeline = pipeline::PipelineConfig::from_json(j["pipeline"]);
    if (j.contains("degradation")) c.degradation = degrade::DegradationConfig::from_json(j["degradation"]);
    if (j.contains("ropo")) c.ropo = ropo::RopoConfig::from_json(j["ropo"]);
    if (j.contains("schedule")) c.schedule = diffmath::ScheduleProfile::from_json(j["schedule"]);
    if (j.contains("niqe_model")) c.niqe_model = resolve_path(j["niqe_model"], base_dir);
    if (j.contains("brisque_weights")) c.brisque_weights = resolve_path(j["brisque_weights"], base_dir);
    if (j.contains("scorers")) {
      for (const auto& [metric, s] : j["scorers"].items()) {
        ScorerEntry e;
        e.command = s.at("command").get<std::vector<std::string>>();
        e.timeout_s = s.value("timeout_s", e.timeout_s);
        if (e.command.empty()) throw InvalidArgument("config: scorer " + metric + " has an empty command");
        c.scorers[metric] = std::move(e);
      }
    }
    if (j.contains("review")) {
      const auto& r = j["review"];
      c.review.host = r.value("host", c.review.host);
      c.review.port = r.value("port", c.review.port);
      c.review.lease_ttl = std::chrono::seconds(r.value("lease_ttl_s", static_cast<long>(c.review.lease_ttl.count())));
      if (r.contains("tokens")) c.review.tokens = r["tokens"].get<std::map<std::string, std::string>>();
      if (r.contains("static_dir")) c.review.static_dir = resolve_path(r["static_dir"], base_dir);
    }
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (c.workers < 1) throw InvalidArgument("config: workers must be >= 1");
  c.pipeline.workers = c.workers;
  return c;
}

GlobalConfig GlobalConfig::load(const fs::path& path) {
  return from_json(read_json_file(path), fs::absolute(path).parent_path());
}

Json GlobalConfig::to_json() const {
  Json j;
  if (store) j["store"] = store->string();
  j["seed"] = seed;
  j["workers"] = workers;
  j["pipeline"] = pipeline.to_json();
  j["degradation"] = degradation.to_json();
  j["ropo"] = ropo.to_json();
  j["schedule"] = schedule.to_json();
  if (niqe_model) j["niqe_model"] = niqe_model->string();
  if (brisque_weights) j["brisque_weights"] = brisque_weights->string();
  Json s = Json::object();
  for (const auto& [m, e] : scorers) s[m] = {{"command", e.command}, {"timeout_s", e.timeout_s}};
  j["scorers"] = s;
  j["review"] = {{"host", review.host}, {"port", review.port}, {"lease_ttl_s", review.lease_ttl.count()}};
  return j;
}

std::string GlobalConfig::digest() const {
  Json j = to_json();
  j.erase("workers");
  j["pipeline"].erase("workers");
  j.erase("store");
  j.erase("review");
  return json_digest(j);
}

}  // namespace hfaid::cli
