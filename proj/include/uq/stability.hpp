#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uq {

inline constexpr double kChangeRatioEpsilon = 1e-8;

// u_k for k = 2..N of one item and method, in generation order.
struct PrefixSeries {
  std::string item_id;
  std::string method;
  std::vector<double> values;  // values[0] is u_2

  std::optional<double> at(std::size_t k) const {
    if (k < 2 || k - 2 >= values.size()) return std::nullopt;
    return values[k - 2];
  }
};

enum class DeltaMode { kRelative, kAbsolute };

// Mean of |u_{k+1} - u_k| / (|u_k| + eps); kAbsolute drops the denominator.
// Absent when the series has fewer than two points.
std::optional<double> change_ratio(const PrefixSeries& series,
                                   DeltaMode mode = DeltaMode::kRelative,
                                   double eps = kChangeRatioEpsilon);

struct StabilityResult {
  std::optional<double> delta;
  std::optional<double> spearmanr;
};

std::vector<double> average_ranks(std::span<const double> values);

// Absent when fewer than 2 points or either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);

// Mean over k of Spearman's rho between the across-item uncertainties at
// prefix k and k+1. Steps with fewer than 3 items or a constant side are
// skipped; absent when no step is defined.
std::optional<double> stepwise_spearman(std::span<const PrefixSeries> all_series);

StabilityResult evaluate_stability(std::span<const PrefixSeries> all_series,
                                   DeltaMode mode = DeltaMode::kRelative,
                                   double eps = kChangeRatioEpsilon);

struct CorrelationMatrix {
  std::vector<std::string> methods;
  // r[a][b]; absent where undefined.
  std::vector<std::vector<std::optional<double>>> r;
};

// Pairwise-complete Pearson r between methods over one configuration's
// items. Each column holds one value per item; absent values are skipped
// pairwise. A pair needs at least 3 shared items.
CorrelationMatrix pearson_matrix(
    const std::map<std::string, std::vector<std::optional<double>>>& columns);

enum class Direction { kHigherBetter, kLowerBetter };

struct RankEntry {
  std::string configuration;
  std::string metric;
  std::string method;
  std::optional<double> value;
};

struct RankTable {
  // (configuration, metric) -> method -> rank
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> per_config;
  // metric -> method -> mean rank over configurations where present
  std::map<std::string, std::map<std::string, double>> aggregate;
};

// Direction for the benchmark metrics: auroc, c_index, auarc, spearmanr are
// higher-better; auerc, delta lower-better.
Direction metric_direction(const std::string& metric);

RankTable aggregate_ranks(std::span<const RankEntry> entries,
                          const std::map<std::string, Direction>& directions);
RankTable aggregate_ranks(std::span<const RankEntry> entries);

}  // namespace uq
