#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uq/categorical.hpp"
#include "uq/error.hpp"

using namespace uq;

namespace {

constexpr Label kInvalid = std::nullopt;

LabelHistogram hist(std::map<Label, int> counts) { return LabelHistogram(std::move(counts)); }

}  // namespace

TEST_CASE("numset") {
  CHECK(numset(hist({{2, 5}})) == 1);
  CHECK(numset(hist({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {kInvalid, 1}})) == 5);
  CHECK(numset(hist({{2, 3}, {1, 2}})) == 2);
}

TEST_CASE("mar") {
  CHECK(mar(hist({{2, 5}})) == 0.0);
  CHECK(mar(hist({{2, 3}, {1, 1}, {0, 1}})) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mar(hist({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}})) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("categorical entropy") {
  CHECK(categorical_entropy(hist({{2, 5}})) == 0.0);
  CHECK(categorical_entropy(hist({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}})) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-14));
  // -(0.4 ln 0.4 + 0.4 ln 0.4 + 0.2 ln 0.2)
  CHECK(categorical_entropy(hist({{2, 2}, {1, 2}, {0, 1}})) ==
        doctest::Approx(1.0549201679861442).epsilon(1e-14));
}

TEST_CASE("fsd") {
  CHECK(fsd(hist({{2, 5}})) == 0.0);
  CHECK(fsd(hist({{2, 3}, {1, 2}})) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(fsd(hist({{2, 2}, {1, 2}, {0, 1}})) == 1.0);
}

TEST_CASE("histogram validation") {
  CHECK_THROWS_AS(hist({{1, 1}}), ValidationError);
  CHECK_THROWS_AS(hist({{1, -1}, {2, 4}}), ValidationError);
  auto h = hist({{1, 0}, {2, 2}});
  CHECK(h.counts().size() == 1);
  CHECK(h.total() == 2);
}

TEST_CASE("INVALID is its own category") {
  std::vector<Label> labels = {2, 2, kInvalid, kInvalid, 2};
  auto h = LabelHistogram::from_labels(labels);
  CHECK(numset(h) == 2);
  CHECK(mar(h) == doctest::Approx(0.4));
}

TEST_CASE("property: relabeling and permutation invariance, unanimity, bounds") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<Label> labels;
    for (int i = 0; i < n; ++i) {
      const int v = static_cast<int>(rng() % 5);
      labels.push_back(v == 4 ? kInvalid : Label(v));
    }
    const auto h = LabelHistogram::from_labels(labels);
    // Bijective relabeling: x -> 10 - x, INVALID <-> 42.
    std::vector<Label> relabeled;
    for (const auto& l : labels) relabeled.push_back(l ? Label(10 - *l) : Label(42));
    std::shuffle(relabeled.begin(), relabeled.end(), rng);
    const auto r = LabelHistogram::from_labels(relabeled);
    CHECK(numset(h) == numset(r));
    CHECK(mar(h) == mar(r));
    CHECK(categorical_entropy(h) == doctest::Approx(categorical_entropy(r)).epsilon(1e-14));
    CHECK(fsd(h) == fsd(r));

    const bool unanimous = numset(h) == 1;
    CHECK(unanimous == (mar(h) == 0.0));
    CHECK(unanimous == (categorical_entropy(h) == 0.0));
    CHECK(unanimous == (fsd(h) == 0.0));

    CHECK(fsd(h) >= 0.0);
    CHECK(fsd(h) <= 1.0);
    CHECK(categorical_entropy(h) >= 0.0);
    CHECK(categorical_entropy(h) <= std::log(static_cast<double>(n)) + 1e-12);
    CHECK(numset(h) >= 1);
    CHECK(numset(h) <= n);
    CHECK(mar(h) <= 1.0 - 1.0 / n + 1e-12);
  }
}

TEST_CASE("property: moving a majority sample to a fresh label never lowers MAR or CE") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::map<Label, int> counts;
    const int n = 3 + trial % 5;
    for (int i = 0; i < n; ++i) ++counts[Label(static_cast<int>(rng() % 3))];
    const auto before = hist(counts);
    auto top = std::max_element(counts.begin(), counts.end(),
                                [](auto& a, auto& b) { return a.second < b.second; });
    --top->second;
    counts[Label(99)] = 1;
    const auto after = hist(counts);
    CHECK(mar(after) >= mar(before) - 1e-15);
    CHECK(categorical_entropy(after) >= categorical_entropy(before) - 1e-15);
  }
}

TEST_CASE("brute-force equivalence against direct definitions (N <= 6, 4 labels)") {
  // Every label sequence up to length 6 over {0, 1, 2, INVALID}.
  std::size_t checked = 0;
  for (int n = 2; n <= 6; ++n) {
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 4;
    for (int code = 0; code < total; ++code) {
      oracle::Labels labels;
      int c = code;
      for (int i = 0; i < n; ++i, c /= 4) labels.push_back(c % 4 == 3 ? kInvalid : Label(c % 4));
      const auto h = LabelHistogram::from_labels(labels);
      REQUIRE(std::abs(numset(h) - oracle::numset(labels)) <= 1e-12);
      REQUIRE(std::abs(mar(h) - oracle::mar(labels)) <= 1e-12);
      REQUIRE(std::abs(categorical_entropy(h) - oracle::entropy(labels)) <= 1e-12);
      REQUIRE(std::abs(fsd(h) - oracle::fsd(labels)) <= 1e-12);
      ++checked;
    }
  }
  CHECK(checked == 16 + 64 + 256 + 1024 + 4096);
}
