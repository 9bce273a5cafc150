#include "uq/categorical.hpp"

#include <cmath>
#include <string>

#include "uq/error.hpp"

namespace uq {

LabelHistogram::LabelHistogram(std::map<Label, int> counts) {
  for (auto it = counts.begin(); it != counts.end();) {
    if (it->second < 0) throw ValidationError("negative label count");
    total_ += it->second;
    it = it->second == 0 ? counts.erase(it) : std::next(it);
  }
  if (total_ < 2) {
    throw ValidationError("histogram total " + std::to_string(total_) + " < 2");
  }
  counts_ = std::move(counts);
}

LabelHistogram LabelHistogram::from_labels(std::span<const Label> labels) {
  std::map<Label, int> counts;
  for (const auto& l : labels) ++counts[l];
  return LabelHistogram(std::move(counts));
}

std::pair<int, int> LabelHistogram::top_two() const {
  int first = 0;
  int second = 0;
  for (const auto& [label, c] : counts_) {
    if (c > first) {
      second = first;
      first = c;
    } else if (c > second) {
      second = c;
    }
  }
  return {first, second};
}

double numset(const LabelHistogram& h) { return static_cast<double>(h.counts().size()); }

double mar(const LabelHistogram& h) {
  return 1.0 - static_cast<double>(h.top_two().first) / h.total();
}

double categorical_entropy(const LabelHistogram& h) {
  double entropy = 0.0;
  const double n = h.total();
  for (const auto& [label, c] : h.counts()) {
    const double p = c / n;
    entropy -= p * std::log(p);
  }
  return entropy;
}

double fsd(const LabelHistogram& h) {
  auto [first, second] = h.top_two();
  return 1.0 - static_cast<double>(first - second) / h.total();
}

}  // namespace uq
