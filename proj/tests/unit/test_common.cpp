#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "hfaid/common/hashing.hpp"
#include "hfaid/common/json_util.hpp"
#include "hfaid/common/parallel.hpp"
#include "hfaid/common/rng.hpp"

using namespace hfaid;

TEST_CASE("sha256 known answer") {
  CHECK(sha256_hex(std::string_view("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("content ids are 32 lowercase hex characters") {
  const std::vector<std::uint8_t> bytes{1, 2, 3};
  const auto id = content_id(bytes);
  CHECK(id.size() == 32);
  CHECK(is_content_id(id));
  CHECK_FALSE(is_content_id("ABCDEF0123456789ABCDEF0123456789"));
  CHECK_FALSE(is_content_id("abc"));
}

TEST_CASE("derive_seed matches hashlib reference values") {
  // sha256(le64(seed) + key)[:8] as a big-endian integer, computed offline.
  CHECK(derive_seed(0, "") == 12634128529936681850ull);
  CHECK(derive_seed(42, "abc") == 7244258000430265897ull);
  CHECK(derive_seed(7, "0123456789abcdef0123456789abcdef") == 11024648861766120770ull);
}

TEST_CASE("base64 round trip") {
  std::vector<std::uint8_t> bytes(10);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i);
  CHECK(base64_encode(bytes) == "AAECAwQFBgcICQ==");
  CHECK(base64_decode("AAECAwQFBgcICQ==") == bytes);
}

TEST_CASE("rng engine is the standard mt19937_64") {
  // The standard fixes the 10000th output of a default-seeded mt19937_64.
  Rng rng(5489);
  std::uint64_t v = 0;
  for (int i = 0; i < 10000; ++i) v = rng.next_u64();
  CHECK(v == 9981545732273789042ull);
}

TEST_CASE("rng distributions") {
  Rng rng(1);
  double sum = 0.0, sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);

  std::set<std::int64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto k = rng.uniform_int(-2, 2);
    CHECK(k >= -2);
    CHECK(k <= 2);
    seen.insert(k);
  }
  CHECK(seen.size() == 5);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("rng streams are reproducible and forks are independent of draw position") {
  Rng a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  Rng c(99);
  c.next_u64();
  CHECK(c.fork("x").next_u64() == Rng(99).fork("x").next_u64());
  CHECK(Rng(99).fork("x").next_u64() != Rng(99).fork("y").next_u64());
}

TEST_CASE("parallel_for covers every index once and rethrows") {
  for (std::size_t workers : {1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(100, 4, [](std::size_t i) {
                    if (i == 37) throw std::runtime_error("boom");
                  }),
                  std::runtime_error);
}

TEST_CASE("canonical json sorts keys and digests are stable") {
  const Json a = Json::parse(R"({"b":1,"a":{"d":2,"c":3}})");
  const Json b = Json::parse(R"({"a":{"c":3,"d":2},"b":1})");
  CHECK(canonical_json(a) == R"({"a":{"c":3,"d":2},"b":1})");
  CHECK(json_digest(a) == json_digest(b));
  CHECK(json_digest(a).size() == 64);
}
