#include <doctest.h>

#include <httplib.h>

#include "hfaid/common/error.hpp"
#include "hfaid/corpus/store.hpp"
#include "hfaid/fixtures/scenes.hpp"
#include "hfaid/imgproc/codec.hpp"
#include "hfaid/review/protocol.hpp"
#include "hfaid/review/service.hpp"
#include "test_support.hpp"

using namespace hfaid;
using namespace hfaid::review;
using corpus::Decision;
using corpus::Stage;

namespace {

corpus::ReviewVerdict rv(const std::string& who, Decision d) { return {"r", who, d, std::nullopt, "t"}; }

// Records that passed the aesthetic stage, with aesthetic scores.
void seed_queue(corpus::Store& store, int n) {
  for (int i = 0; i < n; ++i) {
    auto r = test::fake_record("q" + std::to_string(i));
    for (auto s : {Stage::clean, Stage::quality, Stage::aesthetic}) r.stage_verdicts[s] = corpus::Verdict::pass(s);
    r.scores["aesthetic"] = 0.1 * i;
    store.upsert(r);
  }
  auto out = test::fake_record("filtered");
  out.stage_verdicts[Stage::clean] = corpus::Verdict::reject(Stage::clean, "too_small");
  store.upsert(out);
}

std::string record_id(int i) { return test::fake_record("q" + std::to_string(i)).id; }

}  // namespace

TEST_CASE("review status table") {
  const auto A = Decision::approve, R = Decision::reject;
  CHECK(review_status({}) == ReviewStatus::pending);
  CHECK(review_status({rv("a", A)}) == ReviewStatus::pending);
  CHECK(review_status({rv("a", A), rv("b", A)}) == ReviewStatus::approved);
  CHECK(review_status({rv("a", R), rv("b", R)}) == ReviewStatus::rejected);
  CHECK(review_status({rv("a", A), rv("b", R)}) == ReviewStatus::conflicted);
  CHECK(review_status({rv("a", A), rv("b", R), rv("c", A)}) == ReviewStatus::approved);
  CHECK(review_status({rv("a", A), rv("b", R), rv("c", R)}) == ReviewStatus::rejected);
  CHECK(review_status({rv("a", A), rv("b", R), rv("c", A), rv("d", R)}) == ReviewStatus::conflicted);
  // Repeat verdicts by one reviewer do not count.
  CHECK(review_status({rv("a", A), rv("a", A)}) == ReviewStatus::pending);
  CHECK(review_status({rv("a", A), rv("b", R), rv("a", R)}) == ReviewStatus::conflicted);
  CHECK(is_final(ReviewStatus::approved));
  CHECK_FALSE(is_final(ReviewStatus::conflicted));
}

TEST_CASE("queue priority, leases and duplicates") {
  test::TempDir d;
  auto store = corpus::open_store(d / "s");
  seed_queue(*store, 3);
  auto now = Clock::now();
  ServiceConfig cfg;
  cfg.lease_ttl = std::chrono::seconds(60);
  ReviewQueue q(*store, cfg, [&] { return now; });

  // Best aesthetic score first.
  auto a = q.next_assignment("alice");
  REQUIRE(a);
  CHECK(a->record_id == record_id(2));
  CHECK(a->image_url == "/api/image/" + record_id(2));
  CHECK(a->expires_at - a->issued_at == std::chrono::seconds(60));
  // A live lease hides the record from its holder only.
  CHECK(q.next_assignment("alice")->record_id == record_id(1));
  CHECK(q.next_assignment("bob")->record_id == record_id(2));

  CHECK(q.submit_verdict(record_id(2), "alice", Decision::approve, "ok") == ReviewStatus::pending);
  try {
    q.submit_verdict(record_id(2), "alice", Decision::approve, std::nullopt);
    FAIL("duplicate accepted");
  } catch (const ReviewError& e) {
    CHECK(e.status() == 409);
  }
  // Fewer verdicts come first: record 1 (leased by alice), then 0.
  CHECK(q.next_assignment("carol")->record_id == record_id(1));

  try {
    q.submit_verdict(record_id(0), "dave", Decision::approve, std::nullopt);
    FAIL("verdict without lease accepted");
  } catch (const ReviewError& e) {
    CHECK(e.status() == 409);
  }
  try {
    q.submit_verdict("00000000000000000000000000000000", "bob", Decision::approve, std::nullopt);
    FAIL("unknown record accepted");
  } catch (const ReviewError& e) {
    CHECK(e.status() == 404);
  }

  CHECK(q.submit_verdict(record_id(2), "bob", Decision::approve, std::nullopt) == ReviewStatus::approved);
  // Final records leave the queue.
  for (const auto& who : {"erin", "frank"}) {
    auto x = q.next_assignment(who);
    REQUIRE(x);
    CHECK(x->record_id != record_id(2));
  }

  // Expired leases are refused.
  auto late = q.next_assignment("gina");
  REQUIRE(late);
  now += std::chrono::seconds(61);
  try {
    q.submit_verdict(late->record_id, "gina", Decision::reject, std::nullopt);
    FAIL("expired lease accepted");
  } catch (const ReviewError& e) {
    CHECK(e.status() == 409);
  }
  // After expiry the record is offered again.
  CHECK(q.next_assignment("gina")->record_id == late->record_id);

  const auto p = q.progress();
  CHECK(p["total"] == 3);
  CHECK(p["approved"].get<int>() + p["pending"].get<int>() + p["rejected"].get<int>() + p["conflicted"].get<int>() == 3);
  CHECK(p["approved"] == 1);
  CHECK(p["reviewers"]["alice"] == 1);

  // Verdicts are on disk.
  CHECK(store->get(record_id(2))->review.size() == 2);
}

TEST_CASE("conflicts go to a third reviewer") {
  test::TempDir d;
  auto store = corpus::open_store(d / "s");
  seed_queue(*store, 1);
  ReviewQueue q(*store, ServiceConfig{});
  const auto id = record_id(0);
  q.next_assignment("a");
  q.next_assignment("b");
  CHECK(q.submit_verdict(id, "a", Decision::approve, std::nullopt) == ReviewStatus::pending);
  CHECK(q.submit_verdict(id, "b", Decision::reject, std::nullopt) == ReviewStatus::conflicted);
  CHECK_FALSE(q.next_assignment("a"));
  REQUIRE(q.next_assignment("c"));
  CHECK(q.submit_verdict(id, "c", Decision::reject, std::nullopt) == ReviewStatus::rejected);
  CHECK_FALSE(q.next_assignment("d"));
}

TEST_CASE("token mapping") {
  test::TempDir d;
  auto store = corpus::open_store(d / "s");
  ServiceConfig cfg;
  ReviewQueue open(*store, cfg);
  CHECK(open.reviewer_for("zoe") == "zoe");
  cfg.tokens = {{"t-1", "alice"}};
  ReviewQueue mapped(*store, cfg);
  CHECK(mapped.reviewer_for("t-1") == "alice");
  try {
    mapped.reviewer_for("nope");
    FAIL("unknown token accepted");
  } catch (const ReviewError& e) {
    CHECK(e.status() == 401);
  }
  CHECK_THROWS_AS(open.reviewer_for(""), ReviewError);
}

TEST_CASE("http api") {
  test::TempDir d;
  const auto files = fixtures::write_scenes(d / "imgs", 1, 64, 48, 2);
  {
    auto store = corpus::open_store(d / "s", {corpus::OpenMode::read_write, true});
    seed_queue(*store, 2);
    // Point one record at a real PNG.
    store->update(record_id(1), [&](corpus::ImageRecord& r) { r.path = store->relativize(files[0]); });
    ServiceConfig cfg;
    cfg.port = 0;
    ReviewServer server(*store, cfg);
    server.start();
    httplib::Client cli("127.0.0.1", server.port());

    auto health = cli.Get("/api/health");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto noauth = cli.Get("/api/assignment");
    REQUIRE(noauth);
    CHECK(noauth->status == 401);

    auto asg = cli.Get("/api/assignment?reviewer=alice");
    REQUIRE(asg);
    REQUIRE(asg->status == 200);
    const auto j = Json::parse(asg->body);
    CHECK(j["record_id"] == record_id(1));
    CHECK(j["reviewer_id"] == "alice");
    CHECK(j["scores"]["aesthetic"] == doctest::Approx(0.1));

    auto img = cli.Get(j["image_url"].get<std::string>());
    REQUIRE(img);
    CHECK(img->status == 200);
    CHECK(img->get_header_value("Content-Type") == "image/png");
    CHECK(img->body == test::read_all(files[0]));
    auto missing = cli.Get("/api/image/00000000000000000000000000000000");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    const Json body{{"record_id", record_id(1)}, {"decision", "approve"}, {"note", "sharp"}};
    httplib::Headers h{{"Authorization", "Bearer alice"}};
    auto ok = cli.Post("/api/verdict", h, body.dump(), "application/json");
    REQUIRE(ok);
    CHECK(ok->status == 200);
    CHECK(Json::parse(ok->body)["status"] == "pending");
    auto dup = cli.Post("/api/verdict", h, body.dump(), "application/json");
    REQUIRE(dup);
    CHECK(dup->status == 409);
    auto bad = cli.Post("/api/verdict", h, "{\"record_id\": 3}", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    auto junk = cli.Post("/api/verdict", h, "not json", "application/json");
    REQUIRE(junk);
    CHECK(junk->status == 400);

    // Alice has the other record left, then nothing.
    auto second = cli.Get("/api/assignment", httplib::Headers{{"X-Reviewer-Token", "alice"}});
    REQUIRE(second);
    CHECK(second->status == 200);
    auto none = cli.Get("/api/assignment?reviewer=alice");
    REQUIRE(none);
    CHECK(none->status == 204);

    auto prog = cli.Get("/api/progress");
    REQUIRE(prog);
    CHECK(Json::parse(prog->body)["total"] == 2);

    // The port is taken while the first server runs.
    ServiceConfig same = cfg;
    same.port = server.port();
    ReviewServer second_server(*store, same);
    CHECK_THROWS_AS(second_server.bind(), IoError);
    server.stop();
  }
  // The acknowledged verdict survives a restart.
  auto store = corpus::open_store(d / "s");
  const auto r = store->get(record_id(1));
  REQUIRE(r);
  REQUIRE(r->review.size() == 1);
  CHECK(r->review[0].reviewer_id == "alice");
  CHECK(r->review[0].note == "sharp");
}
