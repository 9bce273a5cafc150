#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uq {

struct ScoredItem {
  std::string item_id;
  double uncertainty = 0.0;
  bool correct = false;
  int abs_error = 0;
};

struct EffectivenessResult {
  std::optional<double> auroc;
  std::optional<double> c_index;
  std::optional<double> auarc;
  std::optional<double> auerc;
  std::size_t m = 0;
};

// How equal-uncertainty items are ordered on the rejection curves.
struct TieBreak {
  enum class Mode { kItemId, kRandom } mode = Mode::kItemId;
  std::uint64_t seed = 0;
};

// P(U_incorrect > U_correct) with ties counted 1/2. Absent unless both
// classes are present.
std::optional<double> auroc(std::span<const ScoredItem> items);

// Concordance between uncertainty and abs_error over pairs with different
// errors; tied uncertainty counts 1/2. Absent when all errors are equal.
std::optional<double> c_index(std::span<const ScoredItem> items);

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

// Retained-set accuracy / mean absolute error after rejecting the j most
// uncertain items, at rejection rates j/m for j = 0..m-1.
std::vector<CurvePoint> accuracy_rejection_curve(std::span<const ScoredItem> items,
                                                 TieBreak tie = {});
std::vector<CurvePoint> error_rejection_curve(std::span<const ScoredItem> items,
                                              TieBreak tie = {});

// Trapezoid over [0, (m-1)/m] normalized by its width. Absent when m < 2.
std::optional<double> auarc(std::span<const ScoredItem> items, TieBreak tie = {});
std::optional<double> auerc(std::span<const ScoredItem> items, TieBreak tie = {});

// False-positive rate vs true-positive rate with incorrect items as positives,
// thresholding at each distinct uncertainty (descending).
std::vector<CurvePoint> roc_curve(std::span<const ScoredItem> items);

EffectivenessResult evaluate_effectiveness(std::span<const ScoredItem> items, TieBreak tie = {});

}  // namespace uq
