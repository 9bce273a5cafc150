#include "uq/effectiveness.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "uq/stability.hpp"

namespace uq {

namespace {

class Fenwick {
 public:
  explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}
  void add(std::size_t i, long long v) {
    for (++i; i < tree_.size(); i += i & (~i + 1)) tree_[i] += v;
  }
  // Sum over [0, i).
  long long prefix(std::size_t i) const {
    long long s = 0;
    for (; i > 0; i -= i & (~i + 1)) s += tree_[i];
    return s;
  }

 private:
  std::vector<long long> tree_;
};

std::vector<std::size_t> rejection_order(std::span<const ScoredItem> items, TieBreak tie) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (tie.mode == TieBreak::Mode::kRandom) {
    std::mt19937_64 rng(tie.seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return items[a].uncertainty < items[b].uncertainty;
    });
  } else {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (items[a].uncertainty != items[b].uncertainty) {
        return items[a].uncertainty < items[b].uncertainty;
      }
      if (items[a].item_id != items[b].item_id) return items[a].item_id < items[b].item_id;
      return a < b;
    });
  }
  return order;
}

// Retained-set mean of `value` after rejecting the j most uncertain items.
template <typename Value>
std::vector<CurvePoint> rejection_curve(std::span<const ScoredItem> items, TieBreak tie,
                                        Value value) {
  const auto order = rejection_order(items, tie);
  const std::size_t m = items.size();
  std::vector<double> prefix(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] + value(items[order[i]]);
  std::vector<CurvePoint> curve;
  curve.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t kept = m - j;
    curve.push_back({static_cast<double>(j) / static_cast<double>(m),
                     prefix[kept] / static_cast<double>(kept)});
  }
  return curve;
}

std::optional<double> normalized_trapezoid(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 2) return std::nullopt;
  double area = 0.0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    area += 0.5 * (curve[i].y + curve[i - 1].y) * (curve[i].x - curve[i - 1].x);
  }
  return area / (curve.back().x - curve.front().x);
}

double correct_value(const ScoredItem& it) { return it.correct ? 1.0 : 0.0; }
double error_value(const ScoredItem& it) { return static_cast<double>(it.abs_error); }

}  // namespace

std::optional<double> auroc(std::span<const ScoredItem> items) {
  std::vector<double> u;
  u.reserve(items.size());
  std::size_t positives = 0;
  for (const auto& it : items) {
    u.push_back(it.uncertainty);
    if (!it.correct) ++positives;
  }
  const std::size_t negatives = items.size() - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  const auto ranks = average_ranks(u);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!items[i].correct) rank_sum += ranks[i];
  }
  const double p = static_cast<double>(positives);
  const double q = static_cast<double>(negatives);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

std::optional<double> c_index(std::span<const ScoredItem> items) {
  // Error levels compressed to ranks for the Fenwick tree.
  std::vector<int> levels;
  for (const auto& it : items) levels.push_back(it.abs_error);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() < 2) return std::nullopt;
  auto level_of = [&](int e) {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), e) -
                                    levels.begin());
  };

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].uncertainty < items[b].uncertainty;
  });

  // Walk ascending uncertainty in tie groups; `below` holds every item with
  // strictly smaller uncertainty, keyed by error level.
  Fenwick below(levels.size());
  std::size_t seen = 0;
  double concordant = 0.0;
  double tied = 0.0;
  double comparable = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() &&
           items[order[j + 1]].uncertainty == items[order[i]].uncertainty) {
      ++j;
    }
    std::map<std::size_t, long long> group_levels;
    for (std::size_t k = i; k <= j; ++k) {
      const std::size_t lv = level_of(items[order[k]].abs_error);
      const auto lower_err = below.prefix(lv);
      const auto higher_err = static_cast<long long>(seen) - below.prefix(lv + 1);
      concordant += static_cast<double>(lower_err);
      comparable += static_cast<double>(lower_err + higher_err);
      ++group_levels[lv];
    }
    // Pairs inside the tie group with different errors.
    const auto group = static_cast<long long>(j - i + 1);
    long long same_level_pairs = 0;
    for (const auto& [lv, c] : group_levels) same_level_pairs += c * (c - 1) / 2;
    const long long mixed = group * (group - 1) / 2 - same_level_pairs;
    tied += static_cast<double>(mixed);
    comparable += static_cast<double>(mixed);

    for (std::size_t k = i; k <= j; ++k) below.add(level_of(items[order[k]].abs_error), 1);
    seen += static_cast<std::size_t>(group);
    i = j + 1;
  }
  return (concordant + 0.5 * tied) / comparable;
}

std::vector<CurvePoint> accuracy_rejection_curve(std::span<const ScoredItem> items, TieBreak tie) {
  return rejection_curve(items, tie, correct_value);
}

std::vector<CurvePoint> error_rejection_curve(std::span<const ScoredItem> items, TieBreak tie) {
  return rejection_curve(items, tie, error_value);
}

std::optional<double> auarc(std::span<const ScoredItem> items, TieBreak tie) {
  if (items.size() < 2) return std::nullopt;
  return normalized_trapezoid(accuracy_rejection_curve(items, tie));
}

std::optional<double> auerc(std::span<const ScoredItem> items, TieBreak tie) {
  if (items.size() < 2) return std::nullopt;
  return normalized_trapezoid(error_rejection_curve(items, tie));
}

std::vector<CurvePoint> roc_curve(std::span<const ScoredItem> items) {
  std::size_t positives = 0;
  for (const auto& it : items) positives += it.correct ? 0 : 1;
  const std::size_t negatives = items.size() - positives;
  std::vector<CurvePoint> curve{{0.0, 0.0}};
  if (positives == 0 || negatives == 0) return curve;

  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return items[a].uncertainty > items[b].uncertainty;
  });
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (items[order[i]].correct) {
      ++fp;
    } else {
      ++tp;
    }
    const bool group_end = i + 1 == order.size() ||
                           items[order[i + 1]].uncertainty != items[order[i]].uncertainty;
    if (group_end) {
      curve.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                       static_cast<double>(tp) / static_cast<double>(positives)});
    }
  }
  return curve;
}

EffectivenessResult evaluate_effectiveness(std::span<const ScoredItem> items, TieBreak tie) {
  EffectivenessResult r;
  r.m = items.size();
  r.auroc = auroc(items);
  r.c_index = c_index(items);
  r.auarc = auarc(items, tie);
  r.auerc = auerc(items, tie);
  return r;
}

}  // namespace uq
