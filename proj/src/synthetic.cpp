#include "uq/synthetic.hpp"

#include <array>
#include <random>
#include <string>

#include "uq/error.hpp"

namespace uq {

namespace {

// Explicit arithmetic on the raw engine output keeps the corpus identical
// across standard-library implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

 private:
  std::mt19937_64 rng_;
};

constexpr std::array<const char*, 6> kVerdicts = {
    "The response misses the central idea and gives no valid reasoning.",
    "The response mentions a relevant term but the explanation is mostly wrong.",
    "The response is partially correct yet omits an important step.",
    "The response is correct and explains the key mechanism clearly.",
    "The response is complete, precise, and well supported by evidence.",
    "The response exceeds the rubric with an additional worked example.",
};

constexpr std::array<const char*, 12> kFiller = {
    "rubric", "student", "concept", "detail", "example", "wording",
    "units",  "method",  "claim",   "answer", "evidence", "structure"};

std::string rationale_for(int label, int label_min, Draw& d) {
  const auto idx = static_cast<std::size_t>(label - label_min) % kVerdicts.size();
  std::string out = kVerdicts[idx];
  out += " Notes on";
  const std::size_t extra = 1 + d.below(3);
  for (std::size_t i = 0; i < extra; ++i) {
    out += ' ';
    out += kFiller[d.below(kFiller.size())];
  }
  out += '.';
  return out;
}

constexpr std::array<Strategy, 3> kStrategies = {Strategy::kZeroShot, Strategy::kZeroShotCot,
                                                 Strategy::kFewShotCot};

}  // namespace

std::vector<SyntheticItem> synthetic_corpus(const SyntheticOptions& opt) {
  if (opt.samples < 2) throw ValidationError("synthetic corpus needs at least 2 samples");
  if (opt.label_max <= opt.label_min) throw ValidationError("synthetic label range is empty");
  if (opt.configs < 1) throw ValidationError("synthetic corpus needs at least one configuration");

  Draw d(opt.seed);
  const auto labels = static_cast<std::size_t>(opt.label_max - opt.label_min + 1);
  std::vector<SyntheticItem> out;
  out.reserve(opt.items);
  for (std::size_t i = 0; i < opt.items; ++i) {
    SyntheticItem item;
    auto& rs = item.set;
    const std::size_t c = i % opt.configs;
    rs.item_id = "syn-" + std::to_string(i);
    rs.config.model = "model-" + std::to_string(c / kStrategies.size());
    rs.config.question = "q1";
    rs.config.strategy = kStrategies[c % kStrategies.size()];
    rs.label_min = opt.label_min;
    rs.label_max = opt.label_max;
    rs.gold = opt.label_min + static_cast<int>(d.below(labels));
    item.reliability = opt.q_min + (opt.q_max - opt.q_min) * d.unit();
    for (std::size_t k = 0; k < opt.samples; ++k) {
      int score = rs.gold;
      if (d.unit() >= item.reliability) {
        // Uniform over the wrong labels.
        const auto off = 1 + d.below(labels - 1);
        score = opt.label_min +
                static_cast<int>((static_cast<std::size_t>(rs.gold - opt.label_min) + off) % labels);
      }
      GradingSample s;
      s.sample_index = k;
      s.score = score;
      s.rationale = rationale_for(score, opt.label_min, d);
      s.raw = s.rationale + "\nScore: " + std::to_string(score);
      rs.samples.push_back(std::move(s));
    }
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace uq
