#include "hfaid/ropo/ropo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/degrade/degrade.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/imgproc/resize.hpp"

namespace hfaid::ropo {
namespace fs = std::filesystem;

std::string_view class_name(SampleClass c) {
  switch (c) {
    case SampleClass::positive: return "positive";
    case SampleClass::negative: return "negative";
    case SampleClass::unconditional: return "unconditional";
  }
  return "positive";
}

SampleClass parse_class(std::string_view name) {
  if (name == "positive") return SampleClass::positive;
  if (name == "negative") return SampleClass::negative;
  if (name == "unconditional") return SampleClass::unconditional;
  throw FormatError("unknown sample class '" + std::string(name) + "'");
}

std::string_view branch_name(Branch b) { return b == Branch::positive ? "positive" : "negative"; }

Branch parse_branch(std::string_view name) {
  if (name == "positive") return Branch::positive;
  if (name == "negative") return Branch::negative;
  throw FormatError("unknown branch '" + std::string(name) + "'");
}

Json RopoSample::to_json() const {
  return Json{{"record_id", record_id},
              {"image_path", image_path},
              {"caption", caption},
              {"class", std::string(class_name(cls))},
              {"branch", std::string(branch_name(branch))},
              {"seed_used", seed_used}};
}

RopoSample RopoSample::from_json(const Json& j) {
  RopoSample s;
  try {
    s.record_id = j.at("record_id").get<std::string>();
    s.image_path = j.at("image_path").get<std::string>();
    s.caption = j.at("caption").get<std::string>();
    s.cls = parse_class(j.at("class").get<std::string>());
    s.branch = parse_branch(j.at("branch").get<std::string>());
    s.seed_used = j.at("seed_used").get<std::uint64_t>();
  } catch (const Json::exception& e) {
    throw FormatError(std::string("ROPO sample: ") + e.what());
  }
  return s;
}

std::string negative_relpath(const std::string& record_id) { return "negatives/" + record_id + ".png"; }

RopoSample build_training_sample(const corpus::ImageRecord& record, Rng& rng, const RopoConfig& cfg,
                                 const SampleContext& ctx) {
  if (!record.caption) throw InvalidArgument("record " + record.id + " has no caption");
  RopoSample s;
  s.record_id = record.id;
  s.seed_used = rng.seed();
  const double u = rng.uniform();
  const bool dropout = rng.bernoulli(cfg.empty_caption_prob);
  const std::uint64_t degrade_seed = rng.next_u64();

  s.branch = u < cfg.ratio_r ? Branch::positive : Branch::negative;
  if (s.branch == Branch::positive) {
    s.cls = SampleClass::positive;
    s.image_path = ctx.original.string();
    s.caption = cfg.positive_identifier + " " + *record.caption;
  } else {
    s.cls = SampleClass::negative;
    s.image_path = negative_relpath(record.id);
    s.caption = cfg.negative_identifier + " " + *record.caption;
    if (cfg.materialize) {
      const auto img = imgproc::resize_long_side_center_crop(imgproc::load_image(ctx.original), cfg.resize_long_side);
      const auto out = degrade::degrade(img, degrade_seed, cfg.degradation);
      fs::create_directories(ctx.out_dir / "negatives");
      imgproc::save_png(out, ctx.out_dir / s.image_path);
    }
  }
  if (dropout) {
    s.cls = SampleClass::unconditional;
    s.caption.clear();
  }
  return s;
}

std::filesystem::path build_manifest(const corpus::Store& store, const std::vector<std::string>& selected,
                                     const RopoConfig& cfg, std::uint64_t seed, const fs::path& out_dir,
                                     std::size_t workers) {
  cfg.validate();
  std::vector<std::string> ids = selected;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<corpus::ImageRecord> records;
  std::vector<std::string> offenders;
  for (const auto& id : ids) {
    auto r = store.get(id);
    if (!r) {
      offenders.push_back(id + " (unknown record)");
    } else if (!r->caption) {
      offenders.push_back(id + " (no caption)");
    } else {
      records.push_back(std::move(*r));
    }
  }
  if (!offenders.empty()) {
    std::string msg = std::to_string(offenders.size()) + " selected record(s) cannot be used:";
    for (const auto& o : offenders) msg += "\n  " + o;
    throw InvalidArgument(msg);
  }

  fs::create_directories(out_dir);
  std::vector<RopoSample> samples(records.size());
  parallel_for(records.size(), workers, [&](std::size_t i) {
    const auto& r = records[i];
    Rng rng(derive_seed(seed, r.id));
    samples[i] = build_training_sample(r, rng, cfg, {fs::absolute(store.resolve(r.path)), out_dir});
  });

  ClassCounts c;
  for (const auto& s : samples) {
    (s.cls == SampleClass::positive ? c.positive : s.cls == SampleClass::negative ? c.negative : c.unconditional) += 1;
    (s.branch == Branch::positive ? c.branch_positive : c.branch_negative) += 1;
  }
  Json header{{"kind", "header"},
              {"format", kRopoFormat},
              {"config_digest", cfg.digest()},
              {"seed", seed},
              {"n", samples.size()},
              {"counts",
               {{"positive", c.positive},
                {"negative", c.negative},
                {"unconditional", c.unconditional},
                {"branch_positive", c.branch_positive},
                {"branch_negative", c.branch_negative}}},
              {"ratio_r", cfg.ratio_r},
              {"empty_caption_prob", cfg.empty_caption_prob},
              {"positive_identifier", cfg.positive_identifier},
              {"negative_identifier", cfg.negative_identifier},
              {"resize_long_side", cfg.resize_long_side},
              {"materialized", cfg.materialize}};
  std::string text = header.dump() + "\n";
  for (const auto& s : samples) text += s.to_json().dump() + "\n";
  const auto path = out_dir / kManifestName;
  write_file_atomic(path, text);
  return path;
}

double binomial_band(double p, std::size_t n) {
  if (n == 0) return 0.0;
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

namespace {

Band make_band(double expected, std::size_t hits, std::size_t n) {
  Band b;
  b.expected = expected;
  b.half_width = binomial_band(expected, n);
  b.observed = n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0;
  // A degenerate p (0 or 1) has a zero-width band; equality still passes.
  b.inside = n == 0 || std::abs(b.observed - expected) <= b.half_width + 1e-12;
  return b;
}

Json band_json(const Band& b) {
  return Json{{"expected", b.expected}, {"half_width", b.half_width}, {"observed", b.observed}, {"inside", b.inside}};
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

Json RatioStats::to_json() const {
  return Json{{"n", n},
              {"counts",
               {{"positive", counts.positive},
                {"negative", counts.negative},
                {"unconditional", counts.unconditional},
                {"branch_positive", counts.branch_positive},
                {"branch_negative", counts.branch_negative}}},
              {"branch_positive", band_json(branch_positive)},
              {"unconditional", band_json(unconditional)},
              {"class_positive", band_json(class_positive)},
              {"prefix_violations", prefix_violations},
              {"ok", ok}};
}

RatioStats verify_ratio(const fs::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw IoError("cannot open " + manifest.string());
  std::string line;
  std::size_t line_no = 0;
  Json header;
  RatioStats st;
  std::string pos_id, neg_id;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (header.is_null()) {
      if (!j.is_object() || j.value("kind", "") != "header" || j.value("format", "") != kRopoFormat) {
        throw FormatError(manifest.string() + ": first line is not a " + kRopoFormat + " header");
      }
      header = j;
      try {
        pos_id = header.at("positive_identifier").get<std::string>();
        neg_id = header.at("negative_identifier").get<std::string>();
      } catch (const Json::exception& e) {
        throw FormatError(manifest.string() + ": header: " + e.what());
      }
      continue;
    }
    RopoSample s;
    try {
      s = RopoSample::from_json(j);
    } catch (const FormatError& e) {
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    ++st.n;
    switch (s.cls) {
      case SampleClass::positive:
        ++st.counts.positive;
        if (!starts_with(s.caption, pos_id + " ")) ++st.prefix_violations;
        break;
      case SampleClass::negative:
        ++st.counts.negative;
        if (!starts_with(s.caption, neg_id + " ")) ++st.prefix_violations;
        break;
      case SampleClass::unconditional:
        ++st.counts.unconditional;
        if (!s.caption.empty()) ++st.prefix_violations;
        break;
    }
    (s.branch == Branch::positive ? st.counts.branch_positive : st.counts.branch_negative) += 1;
  }
  if (header.is_null()) throw FormatError(manifest.string() + ": empty manifest");
  double r = 0.0, p = 0.0;
  try {
    r = header.at("ratio_r").get<double>();
    p = header.at("empty_caption_prob").get<double>();
  } catch (const Json::exception& e) {
    throw FormatError(manifest.string() + ": header: " + e.what());
  }
  st.branch_positive = make_band(r, st.counts.branch_positive, st.n);
  st.unconditional = make_band(p, st.counts.unconditional, st.n);
  st.class_positive = make_band(r * (1.0 - p), st.counts.positive, st.n);
  st.ok = st.branch_positive.inside && st.unconditional.inside && st.class_positive.inside && st.prefix_violations == 0;
  return st;
}

}  // namespace hfaid::ropo
