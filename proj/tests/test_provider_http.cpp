#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "uq/error.hpp"
#include "uq/similarity.hpp"
#include "stub_server.hpp"

using namespace uq;
using nlohmann::json;

namespace {

using testing::StubServer;

ProviderEndpoint endpoint(const std::string& url) {
  ProviderEndpoint ep;
  ep.base_url = url;
  ep.timeout_ms = 2000;
  ep.max_batch = 3;
  ep.max_parallel = 2;
  ep.backoff = std::chrono::milliseconds(5);
  return ep;
}

}  // namespace

TEST_CASE("embed round-trip through HTTP matches the in-process stub") {
  StubServer server;
  HttpProvider http(endpoint(server.url()));
  testing::StubProvider local;
  const std::vector<std::string> texts = {"a b", "c d e", "a b", "f", "g h", "i", "j k l m"};
  CHECK(http.embed(texts) == local.embed(texts));
  CHECK(server.max_seen() <= 3);
  CHECK(server.requests() == 3);
}

TEST_CASE("nli round-trip preserves order and range") {
  StubServer server;
  HttpProvider http(endpoint(server.url()));
  std::vector<SentencePair> pairs = {{"x y", "x y"}, {"x", "z"}, {"a b", "a c"}, {"q", "q"}};
  auto probs = http.entail(pairs);
  REQUIRE(probs.size() == 4);
  CHECK(probs[0] == 1.0);
  CHECK(probs[1] == 0.0);
  CHECK(probs[2] == doctest::Approx(1.0 / 3.0));
  CHECK(probs[3] == 1.0);
}

TEST_CASE("transient failures are retried") {
  StubServer server(2);
  HttpProvider http(endpoint(server.url()));
  auto out = http.embed({"one"});
  CHECK(out.size() == 1);
  CHECK(server.requests() == 3);
}

TEST_CASE("persistent failure becomes a provider error after 1 + 3 attempts") {
  StubServer server(100);
  HttpProvider http(endpoint(server.url()));
  CHECK_THROWS_AS(http.entail({{"a", "b"}}), ProviderError);
  CHECK(server.requests() == 4);
}

TEST_CASE("unreachable provider fails the whole matrix") {
  auto ep = endpoint("http://127.0.0.1:1");
  ep.timeout_ms = 200;
  HttpProvider http(ep);
  SimilarityCache cache;
  CachedProvider p(http, cache);
  ResponseSet rs;
  rs.item_id = "i";
  rs.samples = {{1, "a", "", 0}, {1, "b", "", 1}};
  CHECK_THROWS_AS(build_matrix(rs, SimilarityKind::kEmbed, &p), ProviderError);
  CHECK(cache.size() == 0);
}

TEST_CASE("endpoint validation") {
  ProviderEndpoint ep;
  CHECK_THROWS_AS(HttpProvider{ep}, ValidationError);
  ep.base_url = "127.0.0.1:8000";
  CHECK_THROWS_AS(HttpProvider{ep}, ValidationError);
  ep.base_url = "http://127.0.0.1:8000";
  ep.max_batch = 0;
  CHECK_THROWS_AS(HttpProvider{ep}, ValidationError);
}

TEST_CASE("nli matrix through HTTP equals the in-process matrix") {
  StubServer server;
  HttpProvider http(endpoint(server.url()));
  SimilarityCache c1;
  SimilarityCache c2;
  CachedProvider remote(http, c1);
  testing::StubProvider local_stub;
  CachedProvider local(local_stub, c2);
  ResponseSet rs;
  rs.item_id = "i";
  rs.samples = {{1, "Right answer. Shows work.", "", 0},
                {2, "Right answer.", "", 1},
                {0, "Wrong. No work shown.", "", 2}};
  auto a = build_matrix(rs, SimilarityKind::kNli, &remote);
  auto b = build_matrix(rs, SimilarityKind::kNli, &local);
  CHECK(*a.directed() == *b.directed());
}
