#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>

namespace uq {

// A score label; std::nullopt is the INVALID category (unparseable grade).
using Label = std::optional<int>;

class LabelHistogram {
 public:
  LabelHistogram() = default;
  // Throws ValidationError if any count is negative or the total is below 2.
  explicit LabelHistogram(std::map<Label, int> counts);

  static LabelHistogram from_labels(std::span<const Label> labels);

  const std::map<Label, int>& counts() const { return counts_; }
  int total() const { return total_; }

  // Largest and second-largest counts (second is 0 with one label).
  std::pair<int, int> top_two() const;

 private:
  std::map<Label, int> counts_;
  int total_ = 0;
};

// Number of distinct labels observed.
double numset(const LabelHistogram& h);

// 1 - share of the most frequent label.
double mar(const LabelHistogram& h);

// Shannon entropy of label frequencies, natural log.
double categorical_entropy(const LabelHistogram& h);

// 1 - (top count - runner-up count) / N.
double fsd(const LabelHistogram& h);

}  // namespace uq
