#include <doctest.h>

#include <cmath>
#include <fstream>

#include "hfaid/common/error.hpp"
#include "hfaid/common/hashing.hpp"
#include "hfaid/corpus/ingest.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/fixtures/scenes.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/imgproc/resize.hpp"
#include "hfaid/ropo/ropo.hpp"
#include "test_support.hpp"

using namespace hfaid;
using namespace hfaid::ropo;
namespace fs = std::filesystem;

namespace {

// A store of `n` captioned fixture scenes.
std::unique_ptr<corpus::Store> captioned_store(const test::TempDir& d, std::size_t n, int size = 96) {
  fixtures::write_scenes(d / "imgs", n, size, size * 3 / 4, 31);
  auto store = corpus::open_store(d / "store");
  corpus::ingest_directory(*store, d / "imgs");
  store->update_all([](corpus::ImageRecord& r) {
    r.caption = "scene " + r.id.substr(0, 4);
    return true;
  });
  return store;
}

// Records without image files, for statistics-only runs.
std::unique_ptr<corpus::Store> fake_store(const test::TempDir& d, std::size_t n) {
  auto store = corpus::open_store(d / "fake");
  std::vector<corpus::ImageRecord> recs;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = test::fake_record("f" + std::to_string(i));
    r.caption = "caption " + std::to_string(i);
    recs.push_back(r);
  }
  store->upsert_many(recs);
  return store;
}

std::vector<RopoSample> read_samples(const fs::path& p) {
  std::vector<RopoSample> out;
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) out.push_back(RopoSample::from_json(Json::parse(line)));
  return out;
}

}  // namespace

TEST_CASE("forced branches") {
  test::TempDir d;
  auto store = captioned_store(d, 3);
  const auto rec = store->records().front();
  const SampleContext ctx{store->resolve(rec.path), d / "out"};

  RopoConfig cfg;
  cfg.ratio_r = 1.0;
  cfg.empty_caption_prob = 0.0;
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const auto s = build_training_sample(rec, rng, cfg, ctx);
    CHECK(s.cls == SampleClass::positive);
    CHECK(s.caption == "[X] " + *rec.caption);
    CHECK(s.image_path == ctx.original.string());
  }

  cfg.ratio_r = 0.0;
  cfg.resize_long_side = 64;
  const auto s = build_training_sample(rec, rng, cfg, ctx);
  CHECK(s.cls == SampleClass::negative);
  CHECK(s.caption == "[V] " + *rec.caption);
  CHECK(s.image_path == negative_relpath(rec.id));
  const auto neg = imgproc::load_image(ctx.out_dir / s.image_path);
  CHECK(neg.width == 48);
  CHECK(neg.height == 48);
  const auto pre = imgproc::resize_long_side_center_crop(imgproc::load_image(ctx.original), 64);
  CHECK(imgproc::psnr(pre, neg) < 45.0);

  cfg.empty_caption_prob = 1.0;
  const auto u = build_training_sample(rec, rng, cfg, ctx);
  CHECK(u.cls == SampleClass::unconditional);
  CHECK(u.caption.empty());
  CHECK(u.branch == Branch::negative);
  CHECK(u.image_path == negative_relpath(rec.id));

  auto uncaptioned = rec;
  uncaptioned.caption.reset();
  CHECK_THROWS_AS(build_training_sample(uncaptioned, rng, cfg, ctx), InvalidArgument);
}

TEST_CASE("manifest partition, determinism and offenders") {
  test::TempDir d;
  auto store = fake_store(d, 100);
  RopoConfig cfg;
  cfg.ratio_r = 0.5;
  cfg.empty_caption_prob = 0.0;
  cfg.materialize = false;
  const auto ids = store->ids();
  const auto p1 = build_manifest(*store, ids, cfg, 9, d / "m1", 1);
  const auto p2 = build_manifest(*store, ids, cfg, 9, d / "m2", 8);
  CHECK(test::file_sha256(p1) == test::file_sha256(p2));
  const auto stats = verify_ratio(p1);
  CHECK(stats.n == 100);
  CHECK(stats.counts.positive + stats.counts.negative == 100);
  CHECK(stats.counts.unconditional == 0);

  const auto samples = read_samples(p1);
  for (std::size_t i = 1; i < samples.size(); ++i) CHECK(samples[i - 1].record_id < samples[i].record_id);
  for (const auto& s : samples) CHECK(s.seed_used == derive_seed(9, s.record_id));

  const auto empty = build_manifest(*store, {}, cfg, 9, d / "m3");
  CHECK(verify_ratio(empty).n == 0);

  auto bare = test::fake_record("bare");
  store->upsert(bare);
  std::vector<std::string> bad = ids;
  bad.push_back(bare.id);
  bad.push_back("0123456789abcdef0123456789abcdef");
  try {
    build_manifest(*store, bad, cfg, 9, d / "m4");
    FAIL("expected an error");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find(bare.id) != std::string::npos);
    CHECK(std::string(e.what()).find("0123456789abcdef0123456789abcdef") != std::string::npos);
  }
  CHECK_FALSE(fs::exists(d / "m4" / kManifestName));
}

TEST_CASE("extreme probabilities") {
  test::TempDir d;
  auto store = fake_store(d, 300);
  RopoConfig cfg;
  cfg.materialize = false;
  cfg.ratio_r = 1.0;
  cfg.empty_caption_prob = 0.0;
  auto st = verify_ratio(build_manifest(*store, store->ids(), cfg, 1, d / "a"));
  CHECK(st.counts.negative == 0);
  CHECK(st.ok);
  cfg.ratio_r = 0.8;
  cfg.empty_caption_prob = 1.0;
  st = verify_ratio(build_manifest(*store, store->ids(), cfg, 1, d / "b"));
  CHECK(st.counts.unconditional == 300);
  CHECK(st.ok);
}

TEST_CASE("ratio law at the default r") {
  test::TempDir d;
  auto store = fake_store(d, 20000);
  RopoConfig cfg;
  cfg.materialize = false;
  const auto st = verify_ratio(build_manifest(*store, store->ids(), cfg, 2024, d / "m"));
  CHECK(st.n == 20000);
  CHECK(st.counts.positive + st.counts.negative + st.counts.unconditional == 20000);
  CHECK(std::abs(st.branch_positive.observed - 0.8) <= 0.0085);
  CHECK(std::abs(st.unconditional.observed - 0.05) <= 0.0046);
  CHECK(st.prefix_violations == 0);
  CHECK(st.ok);
}

TEST_CASE("binomial band") {
  CHECK(binomial_band(0.8, 20000) == doctest::Approx(3.0 * std::sqrt(0.8 * 0.2 / 20000)));
  CHECK(binomial_band(0.8, 20000) == doctest::Approx(0.0085).epsilon(0.01));
  CHECK(binomial_band(0.05, 20000) == doctest::Approx(0.0046).epsilon(0.01));
}

TEST_CASE("verify_ratio flags a tampered manifest") {
  test::TempDir d;
  auto store = fake_store(d, 200);
  RopoConfig cfg;
  cfg.materialize = false;
  const auto p = build_manifest(*store, store->ids(), cfg, 5, d / "m");
  std::ifstream in(p);
  std::string header, line, out;
  std::getline(in, header);
  out = header + "\n";
  bool changed = false;
  while (std::getline(in, line)) {
    auto s = RopoSample::from_json(Json::parse(line));
    if (!changed && s.cls == SampleClass::positive) {
      s.caption = "[V] " + s.caption.substr(4);
      changed = true;
    }
    out += s.to_json().dump() + "\n";
  }
  test::write_all(d / "tampered.jsonl", out);
  const auto st = verify_ratio(d / "tampered.jsonl");
  CHECK(st.prefix_violations == 1);
  CHECK_FALSE(st.ok);

  test::write_all(d / "junk.jsonl", "{\"kind\":\"nope\"}\n");
  CHECK_THROWS_AS(verify_ratio(d / "junk.jsonl"), FormatError);
}

TEST_CASE("materialized negatives are reproducible") {
  test::TempDir d;
  auto store = captioned_store(d, 6, 120);
  RopoConfig cfg;
  cfg.ratio_r = 0.3;
  cfg.resize_long_side = 96;
  const auto p1 = build_manifest(*store, store->ids(), cfg, 3, d / "a", 1);
  const auto p2 = build_manifest(*store, store->ids(), cfg, 3, d / "b", 4);
  CHECK(test::file_sha256(p1) == test::file_sha256(p2));
  int negatives = 0;
  for (const auto& s : read_samples(p1)) {
    if (s.branch != Branch::negative) continue;
    ++negatives;
    CHECK(test::file_sha256(d / "a" / s.image_path) == test::file_sha256(d / "b" / s.image_path));
  }
  CHECK(negatives > 0);
}

TEST_CASE("config validation") {
  RopoConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(RopoConfig::from_json(cfg.to_json()).to_json() == cfg.to_json());
  auto bad = cfg;
  bad.negative_identifier = "[X]";
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.ratio_r = 1.2;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.positive_identifier = "";
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
