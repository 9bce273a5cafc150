#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "uq/stability.hpp"

using namespace uq;

namespace {

PrefixSeries series(std::vector<double> v, std::string id = "x") {
  return {std::move(id), "m", std::move(v)};
}

}  // namespace

TEST_CASE("change ratio examples") {
  CHECK(change_ratio(series({0.4, 0.4, 0.4})) == 0.0);
  CHECK(std::abs(*change_ratio(series({1.0, 1.1})) - 0.1) < 1e-8);
  CHECK(*change_ratio(series({0.0, 0.5})) == doctest::Approx(5e7).epsilon(1e-12));
  CHECK_FALSE(change_ratio(series({0.3})).has_value());
  CHECK(*change_ratio(series({0.0, 0.5}), DeltaMode::kAbsolute) == 0.5);
}

TEST_CASE("property: change ratio is non-negative and zero only for constant series") {
  std::mt19937 rng(47);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> v;
    const int len = 2 + t % 5;
    const bool constant = t % 3 == 0;
    for (int k = 0; k < len; ++k) v.push_back(constant ? 0.25 : static_cast<double>(rng() % 4));
    const double r = *change_ratio(series(v));
    CHECK(r >= 0.0);
    bool is_const = std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
    CHECK((r == 0.0) == is_const);
  }
}

TEST_CASE("stepwise spearman examples") {
  std::vector<PrefixSeries> same = {series({0.1, 0.1, 0.1}, "a"), series({0.5, 0.5, 0.5}, "b"),
                                    series({0.9, 0.9, 0.9}, "c")};
  CHECK(*stepwise_spearman(same) == doctest::Approx(1.0).epsilon(1e-15));

  std::vector<PrefixSeries> reversed = {series({0.1, 0.9}, "a"), series({0.5, 0.5}, "b"),
                                        series({0.9, 0.1}, "c")};
  CHECK(*stepwise_spearman(reversed) == doctest::Approx(-1.0).epsilon(1e-15));

  // Rankings (1,2,3) -> (1,3,2).
  std::vector<PrefixSeries> swap = {series({0.1, 0.1}, "A"), series({0.2, 0.3}, "B"),
                                    series({0.3, 0.2}, "C")};
  CHECK(*stepwise_spearman(swap) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("stepwise spearman skips undefined steps") {
  // Step 2->3 has a constant side; step 3->4 is a perfect reversal.
  std::vector<PrefixSeries> s = {series({0.0, 0.1, 0.9}, "a"), series({0.0, 0.5, 0.5}, "b"),
                                 series({0.0, 0.9, 0.1}, "c")};
  CHECK(*stepwise_spearman(s) == doctest::Approx(-1.0));
  std::vector<PrefixSeries> flat = {series({0.0, 0.0}, "a"), series({0.0, 0.0}, "b"),
                                    series({0.0, 0.0}, "c")};
  CHECK_FALSE(stepwise_spearman(flat).has_value());
  std::vector<PrefixSeries> two = {series({0.0, 0.1}, "a"), series({0.3, 0.2}, "b")};
  CHECK_FALSE(stepwise_spearman(two).has_value());
}

TEST_CASE("property: spearman matches the closed form on tie-free data") {
  std::mt19937 rng(53);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 3 + t % 10;
    std::vector<double> x(n);
    std::vector<double> y(n);
    std::iota(x.begin(), x.end(), 1.0);
    std::iota(y.begin(), y.end(), 1.0);
    std::shuffle(x.begin(), x.end(), rng);
    std::shuffle(y.begin(), y.end(), rng);
    CHECK(std::abs(*spearman(x, y) - oracle::spearman_closed_form(x, y)) <= 1e-12);
  }
}

TEST_CASE("pearson examples") {
  std::vector<double> x = {1, 2, 3};
  std::vector<double> neg = {-1, -2, -3};
  std::vector<double> y = {1, 2, 4};
  CHECK(*pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(*pearson(x, y) == doctest::Approx(0.9819805060619656).epsilon(1e-14));
  std::vector<double> flat = {2, 2, 2};
  CHECK_FALSE(pearson(x, flat).has_value());
}

TEST_CASE("pearson matrix is symmetric with unit diagonal and pairwise-complete") {
  std::map<std::string, std::vector<std::optional<double>>> cols = {
      {"a", {1, 2, 3, 4, std::nullopt}},
      {"b", {2, 4, 5, 9, 1}},
      {"c", {3, 3, 3, 3, 3}},
      {"d", {-1, -2, -3, -4, 7}},
  };
  auto m = pearson_matrix(cols);
  REQUIRE(m.methods == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(*m.r[0][0] == 1.0);
  CHECK_FALSE(m.r[2][2].has_value());
  CHECK_FALSE(m.r[0][2].has_value());
  CHECK(*m.r[0][3] == doctest::Approx(-1.0));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) CHECK(m.r[i][j] == m.r[j][i]);
  }
}

TEST_CASE("rank aggregation examples") {
  std::vector<RankEntry> e = {{"c1", "auroc", "A", 0.9}, {"c1", "auroc", "B", 0.8},
                              {"c1", "auroc", "C", 0.7}};
  auto t = aggregate_ranks(e);
  CHECK(t.per_config.at({"c1", "auroc"}) == std::map<std::string, double>{{"A", 1}, {"B", 2}, {"C", 3}});

  std::vector<RankEntry> tie = {{"c1", "auerc", "A", 0.1}, {"c1", "auerc", "B", 0.1},
                                {"c1", "auerc", "C", 0.3}};
  t = aggregate_ranks(tie);
  CHECK(t.per_config.at({"c1", "auerc"}) ==
        std::map<std::string, double>{{"A", 1.5}, {"B", 1.5}, {"C", 3}});

  std::vector<RankEntry> two = {{"c1", "delta", "A", 0.1}, {"c1", "delta", "B", 0.2},
                                {"c2", "delta", "A", 0.3}, {"c2", "delta", "B", 0.2}};
  t = aggregate_ranks(two);
  CHECK(t.aggregate.at("delta") == std::map<std::string, double>{{"A", 1.5}, {"B", 1.5}});
}

TEST_CASE("absent values are excluded from ranking") {
  std::vector<RankEntry> e = {{"c1", "auroc", "A", 0.9},  {"c1", "auroc", "B", std::nullopt},
                              {"c2", "auroc", "A", 0.2},  {"c2", "auroc", "B", 0.4}};
  auto t = aggregate_ranks(e);
  CHECK(t.per_config.at({"c1", "auroc"}).size() == 1);
  CHECK(t.aggregate.at("auroc").at("A") == 1.5);
  CHECK(t.aggregate.at("auroc").at("B") == 1.0);
}

TEST_CASE("property: rank sums and monotone-transform invariance") {
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int k = 2 + t % 12;
    std::vector<RankEntry> e;
    std::vector<RankEntry> transformed;
    for (int m = 0; m < k; ++m) {
      const double v = u(rng);
      e.push_back({"c", "auroc", "m" + std::to_string(m), v});
      transformed.push_back({"c", "auroc", "m" + std::to_string(m), std::log(v + 1.0) * 5.0});
    }
    auto a = aggregate_ranks(e);
    auto b = aggregate_ranks(transformed);
    double sum = 0.0;
    for (const auto& [m, r] : a.per_config.at({"c", "auroc"})) sum += r;
    CHECK(sum == doctest::Approx(k * (k + 1) / 2.0));
    CHECK(a.per_config == b.per_config);

    std::vector<PrefixSeries> s;
    std::vector<PrefixSeries> s2;
    for (int i = 0; i < 6; ++i) {
      std::vector<double> v = {u(rng), u(rng), u(rng)};
      std::vector<double> w;
      for (double x : v) w.push_back(std::exp(x));
      s.push_back(series(v, std::to_string(i)));
      s2.push_back(series(w, std::to_string(i)));
    }
    CHECK(*stepwise_spearman(s) == doctest::Approx(*stepwise_spearman(s2)).epsilon(1e-14));
  }
}
