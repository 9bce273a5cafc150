#include "uq/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uq/error.hpp"

namespace uq {

std::optional<double> change_ratio(const PrefixSeries& series, DeltaMode mode, double eps) {
  const auto& u = series.values;
  if (u.size() < 2) return std::nullopt;
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    const double step = std::abs(u[k + 1] - u[k]);
    sum += mode == DeltaMode::kRelative ? step / (std::abs(u[k]) + eps) : step;
  }
  return sum / static_cast<double>(u.size() - 1);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

std::optional<double> stepwise_spearman(std::span<const PrefixSeries> all_series) {
  std::size_t max_k = 0;
  for (const auto& s : all_series) max_k = std::max(max_k, s.values.size() + 1);
  double sum = 0.0;
  std::size_t defined = 0;
  for (std::size_t k = 2; k < max_k; ++k) {
    std::vector<double> now;
    std::vector<double> next;
    for (const auto& s : all_series) {
      auto a = s.at(k);
      auto b = s.at(k + 1);
      if (a && b) {
        now.push_back(*a);
        next.push_back(*b);
      }
    }
    if (now.size() < 3) continue;
    if (auto rho = spearman(now, next)) {
      sum += *rho;
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / static_cast<double>(defined);
}

StabilityResult evaluate_stability(std::span<const PrefixSeries> all_series, DeltaMode mode,
                                   double eps) {
  StabilityResult out;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& s : all_series) {
    if (auto r = change_ratio(s, mode, eps)) {
      sum += *r;
      ++count;
    }
  }
  if (count > 0) out.delta = sum / static_cast<double>(count);
  out.spearmanr = stepwise_spearman(all_series);
  return out;
}

CorrelationMatrix pearson_matrix(
    const std::map<std::string, std::vector<std::optional<double>>>& columns) {
  CorrelationMatrix out;
  for (const auto& [name, col] : columns) out.methods.push_back(name);
  const std::size_t k = out.methods.size();
  out.r.assign(k, std::vector<std::optional<double>>(k));

  std::vector<const std::vector<std::optional<double>>*> cols;
  for (const auto& [name, col] : columns) cols.push_back(&col);

  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      const auto& ca = *cols[a];
      const auto& cb = *cols[b];
      if (ca.size() != cb.size()) throw ValidationError("pearson_matrix: ragged columns");
      std::vector<double> x;
      std::vector<double> y;
      for (std::size_t i = 0; i < ca.size(); ++i) {
        if (ca[i] && cb[i]) {
          x.push_back(*ca[i]);
          y.push_back(*cb[i]);
        }
      }
      std::optional<double> r;
      if (x.size() >= 3) r = pearson(x, y);
      if (a == b && r) r = 1.0;
      out.r[a][b] = r;
      out.r[b][a] = r;
    }
  }
  return out;
}

Direction metric_direction(const std::string& metric) {
  if (metric == "auerc" || metric == "delta") return Direction::kLowerBetter;
  if (metric == "auroc" || metric == "c_index" || metric == "auarc" || metric == "spearmanr") {
    return Direction::kHigherBetter;
  }
  throw ValidationError("no rank direction for metric \"" + metric + "\"");
}

RankTable aggregate_ranks(std::span<const RankEntry> entries,
                          const std::map<std::string, Direction>& directions) {
  // (configuration, metric) -> method -> value
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> groups;
  for (const auto& e : entries) {
    if (e.value) groups[{e.configuration, e.metric}][e.method] = *e.value;
  }

  RankTable table;
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> sums;
  for (const auto& [key, by_method] : groups) {
    auto dir = directions.find(key.second);
    if (dir == directions.end()) {
      throw ValidationError("no rank direction for metric \"" + key.second + "\"");
    }
    std::vector<double> keyed;
    for (const auto& [method, v] : by_method) {
      keyed.push_back(dir->second == Direction::kHigherBetter ? -v : v);
    }
    const auto ranks = average_ranks(keyed);
    std::size_t i = 0;
    auto& slot = table.per_config[key];
    for (const auto& [method, v] : by_method) {
      slot[method] = ranks[i];
      auto& acc = sums[key.second][method];
      acc.first += ranks[i];
      ++acc.second;
      ++i;
    }
  }
  for (const auto& [metric, by_method] : sums) {
    for (const auto& [method, acc] : by_method) {
      table.aggregate[metric][method] = acc.first / static_cast<double>(acc.second);
    }
  }
  return table;
}

RankTable aggregate_ranks(std::span<const RankEntry> entries) {
  std::map<std::string, Direction> directions;
  for (const auto& e : entries) directions.emplace(e.metric, metric_direction(e.metric));
  return aggregate_ranks(entries, directions);
}

}  // namespace uq
