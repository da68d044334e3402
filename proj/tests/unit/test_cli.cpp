#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "hfaid/cli/cli.hpp"
#include "hfaid/cli/global_config.hpp"
#include "hfaid/corpus/manifest.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/fixtures/scenes.hpp"
#include "test_support.hpp"

using namespace hfaid;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result hfaid_run(std::vector<std::string> args) {
  args.insert(args.begin(), "hfaid");
  std::ostringstream out, err;
  Result r;
  r.code = cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace

TEST_CASE("ingest, score, select and report") {
  test::TempDir d;
  fixtures::write_scenes(d / "imgs", 3, 160, 140, 5);
  const auto store = (d / "store").string();

  auto r = hfaid_run({"--store", store, "ingest", (d / "imgs").string()});
  REQUIRE(r.code == 0);
  auto j = Json::parse(r.out);
  CHECK(j["added"] == 3);
  CHECK(j["store_count"] == 3);

  r = hfaid_run({"--store", store, "--dry-run", "ingest", (d / "imgs").string()});
  CHECK(r.code == 0);
  CHECK(Json::parse(r.out)["dry_run"] == true);

  // No scores yet: stage 2 must name the missing metric.
  test::write_all(d / "cfg.json",
                  Json{{"pipeline", {{"metric_channels", {{{"metric", "laplacian_var"}, {"percentile_keep", 50}}}},
                                     {"min_short_side", 128}}}}
                      .dump());
  const auto cfg = (d / "cfg.json").string();
  r = hfaid_run({"--config", cfg, "--store", store, "select", "--stages", "1,2"});
  CHECK(r.code == 1);
  CHECK(r.err.find("laplacian_var") != std::string::npos);

  r = hfaid_run({"--config", cfg, "--store", store, "score", "--metric", "laplacian_var"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)[0]["updated"] == 3);

  r = hfaid_run({"--config", cfg, "--store", store, "select", "--stages", "clean,quality"});
  REQUIRE(r.code == 0);
  j = Json::parse(r.out);
  CHECK(j["dry_run"] == false);

  r = hfaid_run({"--config", cfg, "--store", store, "report", "--out", (d / "report.json").string()});
  REQUIRE(r.code == 0);
  const auto m = corpus::read_manifest(d / "report.json");
  CHECK(m.entries.size() == 3);
  CHECK(m.extra.contains("report"));

  // Unknown metric without a configured scorer.
  r = hfaid_run({"--store", store, "score", "--metric", "clipiqa"});
  CHECK(r.code == 1);
  CHECK(r.err.find("clipiqa") != std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(hfaid_run({"frobnicate"}).code == 2);
  CHECK(hfaid_run({}).code == 2);
  CHECK(hfaid_run({"ingest"}).code == 2);
  CHECK(hfaid_run({"--help"}).code == 0);
  // A store-backed command without a store.
  test::TempDir d;
  std::filesystem::create_directories(d / "x");
  CHECK(hfaid_run({"ingest", (d / "x").string()}).code == 2);
  CHECK(hfaid_run({"--store", (d / "s").string(), "select", "--stages", "9"}).code == 2);
}

TEST_CASE("demo-sample hits the target moments") {
  test::TempDir d;
  test::write_all(d / "cfg.json", Json{{"schedule", "desk"}}.dump());
  const auto r = hfaid_run({"--config", (d / "cfg.json").string(), "demo-sample", "--n", "10000", "--mean", "2", "--std", "0.5"});
  REQUIRE(r.code == 0);
  const auto j = Json::parse(r.out);
  CHECK(std::abs(j["sample_mean"].get<double>() - 2.0) / 2.0 <= 0.05);
  CHECK(std::abs(j["sample_variance"].get<double>() - 0.25) / 0.25 <= 0.10);
}

TEST_CASE("gen-fixtures, fit-niqe and degrade-corpus") {
  test::TempDir d;
  auto r = hfaid_run({"--seed", "3", "gen-fixtures", "--out", (d / "fx").string(), "--count", "2", "--width", "64",
                      "--checkerboard"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["files"].size() == 3);

  r = hfaid_run({"--seed", "3", "degrade-corpus", "--input", (d / "fx").string(), "--out", (d / "dc").string()});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["entries"] == 6);

  r = hfaid_run({"fit-niqe", (d / "fx").string(), "--out", (d / "m.json").string()});
  CHECK(r.code == 1);
}

TEST_CASE("ropo-verify on a broken manifest") {
  test::TempDir d;
  test::write_all(d / "m.jsonl", "garbage\n");
  CHECK(hfaid_run({"ropo-verify", (d / "m.jsonl").string()}).code == 1);
}

#ifdef HFAID_CLI_BIN
TEST_CASE("the installed binary runs") {
  test::TempDir d;
  const std::string cmd = std::string(HFAID_CLI_BIN) + " --seed 1 gen-fixtures --out " + (d / "fx").string() +
                          " --count 1 --width 32 > " + (d / "out.json").string() + " 2>/dev/null";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(Json::parse(test::read_all(d / "out.json"))["files"].size() == 1);
  const std::string bad = std::string(HFAID_CLI_BIN) + " nonsense > /dev/null 2>&1";
  const int status = std::system(bad.c_str());
  CHECK(WEXITSTATUS(status) == 2);
}
#endif
