#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "uq/response.hpp"

namespace uq {

// Seeded synthetic grading corpus. Each item draws a reliability q from
// U[q_min, q_max]; each sample grades the gold label with probability q and
// a uniformly chosen wrong label otherwise. Rationales are templated per
// label with random filler so lexical similarity tracks agreement.
struct SyntheticOptions {
  std::size_t items = 500;
  std::size_t samples = 5;
  std::uint64_t seed = 42;
  double q_min = 0.3;
  double q_max = 1.0;
  int label_min = 0;
  int label_max = 3;
  // Items are dealt round-robin over this many (model, strategy) configurations.
  std::size_t configs = 1;
};

struct SyntheticItem {
  ResponseSet set;
  double reliability = 0.0;
};

std::vector<SyntheticItem> synthetic_corpus(const SyntheticOptions& opt);

}  // namespace uq
