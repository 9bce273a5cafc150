#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "uq/effectiveness.hpp"

using namespace uq;

namespace {

std::vector<ScoredItem> items_from(std::vector<double> u, std::vector<int> err) {
  std::vector<ScoredItem> out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    out.push_back({"i" + std::to_string(i), u[i], err[i] == 0, err[i]});
  }
  return out;
}

std::vector<oracle::Item> to_oracle(const std::vector<ScoredItem>& items) {
  std::vector<oracle::Item> out;
  for (const auto& it : items) out.push_back({it.uncertainty, it.correct, it.abs_error});
  return out;
}

}  // namespace

TEST_CASE("auroc examples") {
  CHECK(auroc(items_from({0.9, 0.8, 0.1, 0.2}, {1, 1, 0, 0})) == 1.0);
  CHECK(auroc(items_from({0.5, 0.5, 0.5, 0.5}, {1, 1, 0, 0})) == 0.5);
  CHECK(auroc(items_from({0.9, 0.3, 0.5}, {1, 1, 0})) == 0.5);
  CHECK_FALSE(auroc(items_from({0.1, 0.2}, {0, 0})).has_value());
  CHECK_FALSE(auroc(items_from({0.1, 0.2}, {1, 2})).has_value());
}

TEST_CASE("c-index examples") {
  CHECK(c_index(items_from({0.9, 0.5, 0.1}, {2, 1, 0})) == 1.0);
  CHECK(c_index(items_from({0.1, 0.5, 0.9}, {2, 1, 0})) == 0.0);
  CHECK(c_index(items_from({0.5, 0.5, 0.2}, {1, 0, 0})) == 0.75);
  CHECK_FALSE(c_index(items_from({0.5, 0.1}, {1, 1})).has_value());
}

TEST_CASE("auarc examples") {
  CHECK(auarc(items_from({0.1, 0.2, 0.3}, {0, 0, 0})) == 1.0);
  CHECK(auarc(items_from({0.1, 0.2, 0.3}, {1, 2, 1})) == 0.0);
  // By ascending U: T, T, F, F. a = 0.5, 2/3, 1, 1 on r = 0, .25, .5, .75.
  const double trapezoid = 0.25 * ((0.5 + 2.0 / 3.0) / 2 + (2.0 / 3.0 + 1.0) / 2 + 1.0);
  CHECK(*auarc(items_from({0.1, 0.2, 0.3, 0.4}, {0, 0, 1, 1})) ==
        doctest::Approx(trapezoid / 0.75).epsilon(1e-14));
  CHECK(trapezoid / 0.75 == doctest::Approx(0.8055555555555556));
  CHECK_FALSE(auarc(items_from({0.1}, {0})).has_value());
}

TEST_CASE("auerc examples") {
  CHECK(auerc(items_from({0.1, 0.2, 0.3}, {0, 0, 0})) == 0.0);
  CHECK(auerc(items_from({0.1, 0.2, 0.3}, {2, 2, 2})) == 2.0);
  CHECK(*auerc(items_from({0.1, 0.2, 0.3}, {0, 1, 2})) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("curves start at the retained-all value") {
  auto items = items_from({0.3, 0.1, 0.7, 0.2, 0.9}, {0, 0, 1, 0, 2});
  auto arc = accuracy_rejection_curve(items);
  auto erc = error_rejection_curve(items);
  CHECK(arc.front().x == 0.0);
  CHECK(arc.front().y == doctest::Approx(3.0 / 5.0));
  CHECK(erc.front().y == doctest::Approx(3.0 / 5.0));
  CHECK(arc.back().x == doctest::Approx(0.8));
  auto roc = roc_curve(items);
  CHECK(roc.front().x == 0.0);
  CHECK(roc.back().x == 1.0);
  CHECK(roc.back().y == 1.0);
}

TEST_CASE("curve ties break by item_id, not position") {
  std::vector<ScoredItem> a = {{"b", 0.5, false, 1}, {"a", 0.5, true, 0}, {"c", 0.1, true, 0}};
  std::vector<ScoredItem> b = {a[2], a[0], a[1]};
  CHECK(*auarc(a) == *auarc(b));
  CHECK(*auerc(a) == *auerc(b));
}

TEST_CASE("seeded random tie-break is reproducible") {
  auto items = items_from({0.5, 0.5, 0.5, 0.5, 0.1}, {1, 0, 1, 0, 0});
  TieBreak t{TieBreak::Mode::kRandom, 99};
  CHECK(*auarc(items, t) == *auarc(items, t));
}

TEST_CASE("property: exhaustive pair oracle for m <= 7") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    const int m = 2 + trial % 6;
    std::vector<double> u;
    std::vector<int> err;
    for (int i = 0; i < m; ++i) {
      u.push_back(static_cast<double>(rng() % 4) / 4.0);  // coarse grid forces ties
      err.push_back(static_cast<int>(rng() % 3));
    }
    const auto items = items_from(u, err);
    const auto o = to_oracle(items);
    const auto a = auroc(items);
    const auto ao = oracle::auroc_pairs(o);
    REQUIRE(a.has_value() == ao.has_value());
    if (a) CHECK(std::abs(*a - *ao) <= 1e-12);
    const auto c = c_index(items);
    const auto co = oracle::c_index_pairs(o);
    REQUIRE(c.has_value() == co.has_value());
    if (c) CHECK(std::abs(*c - *co) <= 1e-12);
  }
}

TEST_CASE("property: rank invariance, flip symmetry, binary complement, shuffle invariance") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const int m = 3 + trial % 20;
    std::vector<double> u;
    std::vector<int> err;
    for (int i = 0; i < m; ++i) {
      u.push_back(unit(rng));
      err.push_back(static_cast<int>(rng() % 2));
    }
    auto items = items_from(u, err);
    auto transformed = items;
    for (auto& it : transformed) it.uncertainty = std::exp(3.0 * it.uncertainty) + 7.0;
    CHECK(auroc(items) == auroc(transformed));
    CHECK(c_index(items) == c_index(transformed));

    if (auto a = auroc(items)) {
      auto flipped = items;
      for (auto& it : flipped) {
        it.correct = !it.correct;
        it.abs_error = it.correct ? 0 : 1;
      }
      CHECK(*auroc(flipped) == doctest::Approx(1.0 - *a).epsilon(1e-12));
    }

    CHECK(std::abs(*auarc(items) + *auerc(items) - 1.0) <= 1e-9);

    auto shuffled = items;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(*auarc(shuffled) == *auarc(items));
    CHECK(*auerc(shuffled) == *auerc(items));
  }
}
