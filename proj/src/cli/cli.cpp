#include "hfaid/cli/cli.hpp"

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hfaid/cli/global_config.hpp"
#include "hfaid/common/error.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/common/rng.hpp"
#include "hfaid/corpus/ingest.hpp"
#include "hfaid/corpus/manifest.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/degrade/synthetic_corpus.hpp"
#include "hfaid/diffmath/sampler.hpp"
#include "hfaid/fixtures/scenes.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/iqa/niqe.hpp"
#include "hfaid/pipeline/native_scores.hpp"
#include "hfaid/pipeline/run.hpp"
#include "hfaid/review/service.hpp"
#include "hfaid/ropo/ropo.hpp"

namespace hfaid::cli {
namespace fs = std::filesystem;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalFlags {
  std::string config;
  std::string store;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool dry_run = false;
};

struct Context {
  GlobalConfig cfg;
  GlobalFlags flags;
  std::ostream& out;

  fs::path store_dir() const {
    if (!flags.store.empty()) return flags.store;
    if (cfg.store) return *cfg.store;
    throw UsageError("no store given: pass --store or set \"store\" in the config");
  }

  std::unique_ptr<corpus::Store> open(bool mutating, bool durable = false) const {
    corpus::StoreOptions o;
    o.mode = !mutating ? corpus::OpenMode::read_only
                       : (flags.dry_run ? corpus::OpenMode::ephemeral : corpus::OpenMode::read_write);
    o.sync_writes = durable;
    return corpus::open_store(store_dir(), o);
  }

  void emit(const Json& j) const { out << j.dump(2) << "\n"; }
};

std::set<corpus::Stage> parse_stages(const std::string& text) {
  std::set<corpus::Stage> stages;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (item.size() == 1 && item[0] >= '1' && item[0] <= '4') {
      stages.insert(static_cast<corpus::Stage>(item[0] - '1'));
    } else {
      try {
        stages.insert(corpus::parse_stage(item));
      } catch (const Error&) {
        throw UsageError("unknown stage '" + item + "' (use 1-4 or clean,quality,aesthetic,human)");
      }
    }
  }
  if (stages.empty()) throw UsageError("--stages is empty");
  return stages;
}

std::vector<imgproc::ImagePlane> load_dir_images(const fs::path& dir, std::size_t workers) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::optional<imgproc::ImagePlane>> loaded(files.size());
  parallel_for(files.size(), workers, [&](std::size_t i) {
    try {
      loaded[i] = imgproc::load_image(files[i]);
    } catch (const FormatError& e) {
      spdlog::warn("skipping {}: {}", files[i].string(), e.what());
    }
  });
  std::vector<imgproc::ImagePlane> out;
  for (auto& l : loaded) {
    if (l) out.push_back(std::move(*l));
  }
  if (out.empty()) throw InvalidArgument("no decodable images in " + dir.string());
  return out;
}

Json score_report_json(const std::string& metric, const pipeline::ScoreRunReport& r) {
  return Json{{"metric", metric}, {"updated", r.updated}, {"failed", r.failed}};
}

// --- subcommands -----------------------------------------------------------

int cmd_ingest(Context& ctx, const std::string& dir, const std::string& captions) {
  auto store = ctx.open(true);
  const auto rep = corpus::ingest_directory(*store, dir, ctx.cfg.workers, ctx.flags.dry_run);
  Json j{{"scanned", rep.scanned},
         {"added", rep.added},
         {"already_present", rep.already_present},
         {"duplicates", rep.duplicates},
         {"undecodable", rep.undecodable}};
  if (!captions.empty()) {
    const auto cr = corpus::import_captions(*store, captions);
    j["captions"] = {{"updated", cr.updated}, {"unmatched", cr.unmatched}, {"warnings", cr.warnings}};
    for (const auto& w : cr.warnings) spdlog::warn("{}", w);
  }
  j["store_count"] = store->size();
  j["dry_run"] = ctx.flags.dry_run;
  ctx.emit(j);
  return kExitOk;
}

int cmd_score(Context& ctx, const std::vector<std::string>& metrics, const std::vector<std::string>& externals,
              const std::string& from_file, const std::string& niqe_model) {
  auto store = ctx.open(true);
  Json results = Json::array();
  if (!from_file.empty()) {
    if (metrics.size() != 1) throw UsageError("--from needs exactly one --metric");
    const auto rep = corpus::merge_scores(*store, from_file, metrics[0]);
    Json rejected = Json::array();
    for (const auto& r : rep.rejected) rejected.push_back({{"line", r.line}, {"message", r.message}});
    results.push_back({{"metric", metrics[0]}, {"updated", rep.updated}, {"rejected", rejected}, {"unmatched", rep.unmatched}});
    ctx.emit(results);
    return kExitOk;
  }

  std::vector<std::string> todo_native, todo_external = externals;
  std::vector<std::string> wanted = metrics;
  if (wanted.empty() && externals.empty()) {
    for (const auto& ch : ctx.cfg.pipeline.metric_channels) wanted.push_back(ch.metric);
    wanted.push_back(ctx.cfg.pipeline.aesthetic_channel.metric);
  }
  std::vector<std::string> unresolved;
  for (const auto& m : wanted) {
    if (pipeline::is_native_metric(m)) {
      todo_native.push_back(m);
    } else if (ctx.cfg.scorers.contains(m)) {
      todo_external.push_back(m);
    } else {
      unresolved.push_back(m);
    }
  }
  for (const auto& m : externals) {
    if (!ctx.cfg.scorers.contains(m)) unresolved.push_back(m);
  }
  if (!unresolved.empty()) {
    std::string msg = "no scorer for metric(s):";
    for (const auto& m : unresolved) msg += " " + m;
    throw Error(msg + " (native: niqe, brisque, laplacian_var; external ones need a \"scorers\" entry in the config)");
  }

  pipeline::NativeScorers scorers;
  const auto needs = [&](const char* m) { return std::find(todo_native.begin(), todo_native.end(), m) != todo_native.end(); };
  if (needs("niqe")) {
    fs::path model = !niqe_model.empty() ? fs::path(niqe_model) : ctx.cfg.niqe_model.value_or(fs::path{});
    if (model.empty()) throw Error("niqe scoring needs a model: run fit-niqe and pass --niqe-model or set niqe_model");
    scorers.niqe = iqa::NiqeModel::load(model);
  }
  if (needs("brisque")) {
    if (!ctx.cfg.brisque_weights) throw Error("brisque scoring needs \"brisque_weights\" in the config");
    scorers.brisque = iqa::BrisqueLinearHead::load(*ctx.cfg.brisque_weights);
  }
  for (const auto& m : todo_native) {
    spdlog::info("scoring {} natively", m);
    results.push_back(score_report_json(m, pipeline::score_native(*store, m, scorers, ctx.cfg.workers)));
  }
  for (const auto& m : todo_external) {
    const auto& e = ctx.cfg.scorers.at(m);
    iqa::ExternalScorerSpec spec{e.command, m, std::chrono::seconds(e.timeout_s)};
    const fs::path work = ctx.flags.dry_run ? fs::temp_directory_path() / "hfaid-dry-run" : store->dir() / "scorer_runs";
    spdlog::info("running external scorer for {}", m);
    results.push_back(score_report_json(m, pipeline::score_external(*store, spec, work)));
  }
  ctx.emit(results);
  return kExitOk;
}

int cmd_select(Context& ctx, const std::string& stages_text) {
  auto store = ctx.open(true);
  const auto report = pipeline::run_pipeline(*store, ctx.cfg.pipeline, parse_stages(stages_text));
  for (const auto& e : report.errors) spdlog::warn("{}", e);
  Json j = report.to_json();
  j["dry_run"] = ctx.flags.dry_run;
  ctx.emit(j);
  return kExitOk;
}

int cmd_degrade_corpus(Context& ctx, const std::string& input, const std::string& out_dir) {
  if (ctx.flags.dry_run) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(input)) n += e.is_regular_file();
    ctx.emit({{"inputs", n}, {"out", out_dir}, {"dry_run", true}});
    return kExitOk;
  }
  const auto manifest = degrade::build_synthetic_corpus(input, out_dir, ctx.cfg.seed, ctx.cfg.degradation, ctx.cfg.workers);
  const auto m = corpus::read_manifest(manifest);
  ctx.emit({{"manifest", manifest.string()}, {"entries", m.entries.size()}});
  return kExitOk;
}

int cmd_fit_niqe(Context& ctx, const std::string& dir, const std::string& out, int patch_size) {
  const auto images = load_dir_images(dir, ctx.cfg.workers);
  const auto model = iqa::fit_niqe_model(images, patch_size);
  if (!ctx.flags.dry_run) model.save(out);
  ctx.emit({{"images", images.size()}, {"feature_dim", model.feature_dim}, {"patch_size", model.patch_size},
            {"out", ctx.flags.dry_run ? Json(nullptr) : Json(out)}});
  return kExitOk;
}

int cmd_ropo_build(Context& ctx, const std::string& out_dir, const std::string& selection, bool manifest_only) {
  auto store = ctx.open(false);
  std::vector<std::string> ids;
  if (!selection.empty()) {
    for (const auto& e : corpus::read_manifest(selection).entries) ids.push_back(e.id);
  } else {
    for (const auto& r : store->records()) {
      if (r.passed(corpus::Stage::human)) ids.push_back(r.id);
    }
  }
  auto cfg = ctx.cfg.ropo;
  if (manifest_only) cfg.materialize = false;
  fs::path target = out_dir;
  if (ctx.flags.dry_run) {
    cfg.materialize = false;
    target = fs::temp_directory_path() / ("hfaid-ropo-dry-run-" + std::to_string(::getpid()));
  }
  const auto path = ropo::build_manifest(*store, ids, cfg, ctx.cfg.seed, target, ctx.cfg.workers);
  const auto stats = ropo::verify_ratio(path);
  Json j{{"manifest", ctx.flags.dry_run ? Json(nullptr) : Json(path.string())}, {"stats", stats.to_json()}};
  if (ctx.flags.dry_run) fs::remove_all(target);
  ctx.emit(j);
  return kExitOk;
}

int cmd_ropo_verify(Context& ctx, const std::string& manifest) {
  const auto stats = ropo::verify_ratio(manifest);
  ctx.emit(stats.to_json());
  if (!stats.ok) {
    spdlog::error("manifest is outside its expected class bands or breaks the prefix law");
    return kExitDomainError;
  }
  return kExitOk;
}

int cmd_serve(Context& ctx, const std::string& host, std::optional<int> port, const std::string& static_dir) {
  auto scfg = ctx.cfg.review;
  if (!host.empty()) scfg.host = host;
  if (port) scfg.port = *port;
  if (!static_dir.empty()) scfg.static_dir = fs::path(static_dir);
  scfg.aesthetic_metric = ctx.cfg.pipeline.aesthetic_channel.metric;
  auto store = ctx.open(true, /*durable=*/true);
  review::ReviewServer server(*store, scfg);
  server.bind();
  // The bound port goes to stdout so scripts can find it when port 0 is used.
  ctx.out << Json{{"listening", scfg.host}, {"port", server.port()}}.dump() << std::endl;
  server.run();
  return kExitOk;
}

int cmd_report(Context& ctx, const std::string& out_file) {
  auto store = ctx.open(false);
  pipeline::PipelineReport rep;
  rep.config_digest = ctx.cfg.pipeline.digest();
  pipeline::summarize_funnel(*store, rep);
  corpus::Provenance prov{ctx.cfg.digest(), corpus::kToolVersion, ctx.cfg.seed};
  auto m = corpus::make_manifest(*store, corpus::all_records(), prov);
  m.extra["report"] = rep.to_json(false);
  if (out_file.empty()) {
    ctx.out << corpus::serialize_manifest(m);
  } else if (!ctx.flags.dry_run) {
    corpus::write_manifest(m, out_file);
    ctx.emit({{"report", out_file}});
  }
  return kExitOk;
}

int cmd_demo_sample(Context& ctx, std::size_t n, double mean, double stddev, double lambda, std::optional<double> neg_mean,
                    bool ddim, const std::string& trajectory) {
  const auto sched = ctx.cfg.schedule.build();
  const auto den = diffmath::gaussian_data_denoiser(sched, mean, stddev);
  std::optional<diffmath::GuidanceConfig> g;
  if (lambda != 0.0 || neg_mean) {
    g = diffmath::GuidanceConfig{lambda, {"positive", {mean}}, {"negative", {neg_mean.value_or(mean)}}};
  }
  Rng rng(ctx.cfg.seed);
  std::ofstream traj;
  diffmath::SamplerOptions opts;
  opts.ddim = ddim;
  if (!trajectory.empty() && !ctx.flags.dry_run) {
    traj.open(trajectory);
    if (!traj) throw IoError("cannot write " + trajectory);
    opts.trajectory = &traj;
  }
  const auto z = diffmath::ddpm_sample(den, sched, g, rng, n, opts);
  double m = 0.0;
  for (double v : z) m += v;
  m /= static_cast<double>(n);
  double var = 0.0;
  for (double v : z) var += (v - m) * (v - m);
  var /= static_cast<double>(n > 1 ? n - 1 : 1);
  ctx.emit({{"n", n},
            {"schedule", ctx.cfg.schedule.to_json()},
            {"target_mean", mean},
            {"target_variance", stddev * stddev},
            {"sample_mean", m},
            {"sample_variance", var},
            {"lambda", lambda},
            {"ddim", ddim}});
  return kExitOk;
}

int cmd_gen_fixtures(Context& ctx, const std::string& out_dir, std::size_t count, int width, int height, bool checker) {
  if (ctx.flags.dry_run) {
    ctx.emit({{"count", count}, {"out", out_dir}, {"dry_run", true}});
    return kExitOk;
  }
  Json files = Json::array();
  if (checker) {
    fs::create_directories(out_dir);
    const auto p = fs::path(out_dir) / "checkerboard.png";
    imgproc::save_png(fixtures::checkerboard(width, height, 8), p);
    files.push_back(p.string());
  }
  for (const auto& p : fixtures::write_scenes(out_dir, count, width, height, ctx.cfg.seed, ctx.cfg.workers)) {
    files.push_back(p.string());
  }
  ctx.emit({{"files", files}});
  return kExitOk;
}

int cmd_calibrate(Context& ctx, const std::string& dir, double pct) {
  const auto images = load_dir_images(dir, ctx.cfg.workers);
  const double v = pipeline::calibrate_laplacian_min(images, pct);
  ctx.emit({{"laplacian_min", v}, {"percentile", pct}, {"images", images.size()}});
  return kExitOk;
}

void setup_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_color_mt("hfaid");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
  if (const char* lvl = std::getenv("HFAID_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  setup_logging();
  CLI::App app{"High-fidelity image curation and restoration-prompt training data tool", "hfaid"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags flags;
  app.add_option("--config", flags.config, "JSON config file (falls back to $HFAID_CONFIG)");
  app.add_option("--store", flags.store, "store directory");
  app.add_option("--seed", flags.seed, "64-bit seed");
  app.add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--dry-run", flags.dry_run, "do not write anything");

  std::function<int(Context&)> action;

  auto* ingest = app.add_subcommand("ingest", "add every image under a directory to the store");
  std::string ingest_dir, captions;
  ingest->add_option("dir", ingest_dir)->required()->check(CLI::ExistingDirectory);
  ingest->add_option("--captions", captions, "caption sidecar (JSON Lines)")->check(CLI::ExistingFile);
  ingest->callback([&] { action = [&](Context& c) { return cmd_ingest(c, ingest_dir, captions); }; });

  auto* score = app.add_subcommand("score", "compute or import per-image metric scores");
  std::vector<std::string> metrics, externals;
  std::string from_file, niqe_model;
  score->add_option("--metric", metrics, "metric to compute (repeatable)");
  score->add_option("--external", externals, "run this configured external scorer (repeatable)");
  score->add_option("--from", from_file, "merge an External Scores file instead")->check(CLI::ExistingFile);
  score->add_option("--niqe-model", niqe_model, "NIQE model file")->check(CLI::ExistingFile);
  score->callback([&] { action = [&](Context& c) { return cmd_score(c, metrics, externals, from_file, niqe_model); }; });

  auto* select = app.add_subcommand("select", "run pipeline stages over the store");
  std::string stages = "1,2,3,4";
  select->add_option("--stages", stages, "comma-separated stages (1-4 or names)");
  select->callback([&] { action = [&](Context& c) { return cmd_select(c, stages); }; });

  auto* dc = app.add_subcommand("degrade-corpus", "write clean/degraded twin corpus with a labeled manifest");
  std::string dc_in, dc_out;
  dc->add_option("--input", dc_in)->required()->check(CLI::ExistingDirectory);
  dc->add_option("--out", dc_out)->required();
  dc->callback([&] { action = [&](Context& c) { return cmd_degrade_corpus(c, dc_in, dc_out); }; });

  auto* fit = app.add_subcommand("fit-niqe", "fit a NIQE model on a directory of pristine images");
  std::string fit_dir, fit_out = "niqe_model.json";
  int patch = iqa::kNiqePatchSize;
  fit->add_option("pristine-dir", fit_dir)->required()->check(CLI::ExistingDirectory);
  fit->add_option("--out", fit_out, "model file");
  fit->add_option("--patch-size", patch, "patch side in pixels");
  fit->callback([&] { action = [&](Context& c) { return cmd_fit_niqe(c, fit_dir, fit_out, patch); }; });

  auto* rb = app.add_subcommand("ropo-build", "build a ROPO training manifest from the selection");
  std::string rb_out, rb_sel;
  bool manifest_only = false;
  rb->add_option("--out", rb_out)->required();
  rb->add_option("--selection", rb_sel, "corpus manifest listing the ids to use (default: stage-4 selection)")
      ->check(CLI::ExistingFile);
  rb->add_flag("--manifest-only", manifest_only, "do not write degraded derivatives");
  rb->callback([&] { action = [&](Context& c) { return cmd_ropo_build(c, rb_out, rb_sel, manifest_only); }; });

  auto* rv = app.add_subcommand("ropo-verify", "check class ratios and caption prefixes of a ROPO manifest");
  std::string rv_path;
  rv->add_option("manifest", rv_path)->required()->check(CLI::ExistingFile);
  rv->callback([&] { action = [&](Context& c) { return cmd_ropo_verify(c, rv_path); }; });

  auto* sv = app.add_subcommand("serve-review", "serve the human-verification API");
  std::string sv_host, sv_static;
  std::optional<int> sv_port;
  sv->add_option("--host", sv_host);
  sv->add_option("--port", sv_port)->check(CLI::Range(0, 65535));
  sv->add_option("--static", sv_static, "directory served at /")->check(CLI::ExistingDirectory);
  sv->callback([&] { action = [&](Context& c) { return cmd_serve(c, sv_host, sv_port, sv_static); }; });

  auto* rp = app.add_subcommand("report", "write the store as a manifest with the funnel report");
  std::string rp_out;
  rp->add_option("--out", rp_out, "output file (default stdout)");
  rp->callback([&] { action = [&](Context& c) { return cmd_report(c, rp_out); }; });

  auto* ds = app.add_subcommand("demo-sample", "toy diffusion sampler over 1-D Gaussian data");
  std::size_t ds_n = 10000;
  double ds_mean = 1.0, ds_std = 1.0, ds_lambda = 0.0;
  std::optional<double> ds_neg;
  bool ds_ddim = false;
  std::string ds_traj;
  ds->add_option("--n", ds_n, "number of samples")->check(CLI::PositiveNumber);
  ds->add_option("--mean", ds_mean);
  ds->add_option("--std", ds_std)->check(CLI::PositiveNumber);
  ds->add_option("--lambda", ds_lambda, "guidance scale");
  ds->add_option("--negative-mean", ds_neg, "data mean under the negative conditioning");
  ds->add_flag("--ddim", ds_ddim);
  ds->add_option("--trajectory", ds_traj, "write per-step state norms (JSON Lines)");
  ds->callback([&] {
    action = [&](Context& c) { return cmd_demo_sample(c, ds_n, ds_mean, ds_std, ds_lambda, ds_neg, ds_ddim, ds_traj); };
  });

  auto* gf = app.add_subcommand("gen-fixtures", "write procedural test scenes");
  std::string gf_out;
  std::size_t gf_count = 10;
  int gf_w = 512, gf_h = 0;
  bool gf_checker = false;
  gf->add_option("--out", gf_out)->required();
  gf->add_option("--count", gf_count);
  gf->add_option("--width", gf_w)->check(CLI::PositiveNumber);
  gf->add_option("--height", gf_h, "default: width");
  gf->add_flag("--checkerboard", gf_checker, "also write checkerboard.png");
  gf->callback([&] {
    action = [&](Context& c) { return cmd_gen_fixtures(c, gf_out, gf_count, gf_w, gf_h > 0 ? gf_h : gf_w, gf_checker); };
  });

  auto* cal = app.add_subcommand("calibrate-laplacian", "suggest laplacian_min from a clean image set");
  std::string cal_dir;
  double cal_pct = 20.0;
  cal->add_option("clean-dir", cal_dir)->required()->check(CLI::ExistingDirectory);
  cal->add_option("--percentile", cal_pct)->check(CLI::Range(0.0, 100.0));
  cal->callback([&] { action = [&](Context& c) { return cmd_calibrate(c, cal_dir, cal_pct); }; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    std::string config_path = flags.config;
    if (config_path.empty()) {
      if (const char* env = std::getenv("HFAID_CONFIG")) config_path = env;
    }
    GlobalConfig cfg = config_path.empty() ? GlobalConfig{} : GlobalConfig::load(config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.workers) cfg.workers = *flags.workers;
    cfg.pipeline.workers = cfg.workers;
    Context ctx{std::move(cfg), flags, out};
    spdlog::info("config {} seed {}", ctx.cfg.digest(), ctx.cfg.seed);
    return action(ctx);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}

}  // namespace hfaid::cli
