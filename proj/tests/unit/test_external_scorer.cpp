#include <doctest.h>

#include "hfaid/common/error.hpp"
#include "hfaid/corpus/ingest.hpp"
#include "hfaid/corpus/manifest.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/iqa/external_scorer.hpp"
#include "hfaid/pipeline/native_scores.hpp"
#include "test_support.hpp"

using namespace hfaid;
using test::fake_record;

namespace {

std::filesystem::path write_manifest(const test::TempDir& d, int n) {
  corpus::Manifest m;
  for (int i = 0; i < n; ++i) {
    auto r = fake_record("s" + std::to_string(i));
    m.entries.push_back(corpus::entry_from_record(r));
  }
  const auto p = d / "in.json";
  corpus::write_manifest(m, p);
  return p;
}

iqa::ExternalScorerSpec stub(const std::string& mode, const std::string& metric = "aesthetic") {
  return {{HFAID_STUB_SCORER, "--metric", metric, "--mode", mode}, metric, std::chrono::seconds(20)};
}

}  // namespace

TEST_CASE("stub scorer output is validated and returned") {
  test::TempDir d;
  const auto manifest = write_manifest(d, 6);
  auto spec = stub("ok");
  spec.command.push_back("--constant");
  spec.command.push_back("0.5");
  const auto out = iqa::run_external_scorer(manifest, spec, d / "scores.jsonl");
  int lines = 0;
  for_each_json_line(
      out, [&](std::size_t, const Json& j) {
        CHECK(j["score"] == 0.5);
        ++lines;
      },
      [](std::size_t, const std::string&) { FAIL("bad line"); });
  CHECK(lines == 6);
}

TEST_CASE("explicit placeholders are substituted") {
  test::TempDir d;
  const auto manifest = write_manifest(d, 2);
  iqa::ExternalScorerSpec spec{{HFAID_STUB_SCORER, "--out", "{out}", "--manifest", "{manifest}"}, "aesthetic",
                               std::chrono::seconds(20)};
  CHECK_NOTHROW(iqa::run_external_scorer(manifest, spec, d / "o.jsonl"));
}

TEST_CASE("scorer failures") {
  test::TempDir d;
  const auto manifest = write_manifest(d, 3);
  CHECK_THROWS_WITH_AS(iqa::run_external_scorer(manifest, stub("fail"), d / "a.jsonl"),
                       doctest::Contains("simulated model crash"), Error);
  CHECK_THROWS_WITH_AS(iqa::run_external_scorer(manifest, stub("unknown-id"), d / "b.jsonl"),
                       doctest::Contains("ffffffffffffffffffffffffffffffff"), Error);
  CHECK_THROWS_AS(iqa::run_external_scorer(manifest, stub("nan"), d / "c.jsonl"), Error);
  CHECK_THROWS_AS(iqa::run_external_scorer(manifest, stub("wrong-metric"), d / "e.jsonl"), Error);
  auto hang = stub("hang");
  hang.timeout = std::chrono::seconds(1);
  CHECK_THROWS_WITH_AS(iqa::run_external_scorer(manifest, hang, d / "d.jsonl"), doctest::Contains("timed out"), Error);
  iqa::ExternalScorerSpec missing{{"/nonexistent/scorer"}, "m", std::chrono::seconds(5)};
  CHECK_THROWS_AS(iqa::run_external_scorer(manifest, missing, d / "f.jsonl"), Error);
}

TEST_CASE("score_external merges stub scores into the store") {
  test::TempDir d;
  auto store = corpus::open_store(d / "store");
  for (int i = 0; i < 4; ++i) store->upsert(fake_record("x" + std::to_string(i)));
  auto rejected = fake_record("rej");
  rejected.stage_verdicts[corpus::Stage::clean] = corpus::Verdict::reject(corpus::Stage::clean, "grayscale");
  store->upsert(rejected);
  const auto rep = pipeline::score_external(*store, stub("ok", "clipiqa"), d / "work");
  CHECK(rep.updated == 4);
  for (const auto& r : store->records()) CHECK(r.score("clipiqa").has_value() == (r.id != rejected.id));
}
