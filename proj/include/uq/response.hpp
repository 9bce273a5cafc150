#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace uq {

enum class Strategy { kZeroShot, kZeroShotCot, kFewShotCot };

std::string_view to_string(Strategy s);
std::optional<Strategy> strategy_from_string(std::string_view s);

// One benchmark configuration: (model, question, generation strategy).
struct ConfigKey {
  std::string model;
  std::string question;
  Strategy strategy = Strategy::kZeroShot;

  auto operator<=>(const ConfigKey&) const = default;
  bool operator==(const ConfigKey&) const = default;

  // "model|question|strategy", used in file names and report labels.
  std::string label() const;
};

struct GradingSample {
  std::optional<int> score;  // absent when no grade could be read
  std::string rationale;
  std::string raw;
  std::size_t sample_index = 0;

  // Text fed to the similarity providers: rationale, or raw when empty.
  const std::string& relation_text() const {
    return rationale.empty() ? raw : rationale;
  }
};

// N repeated gradings of one student answer, in generation order.
struct ResponseSet {
  std::string item_id;
  ConfigKey config;
  int gold = 0;
  int label_min = 0;
  int label_max = 0;
  std::vector<GradingSample> samples;

  std::size_t size() const { return samples.size(); }
  std::vector<std::optional<int>> scores() const;
};

struct Prediction {
  int label = 0;
  bool correct = false;
  int abs_error = 0;
};

enum class PredictionRule { kMajority, kFirstSample };

struct RecordReject {
  std::size_t line = 0;
  std::string item_id;
  std::string reason;
};

struct ResponseCorpus {
  // Grouped by ConfigKey; file order is preserved inside each group.
  std::vector<ResponseSet> sets;
  std::vector<RecordReject> rejects;
};

inline constexpr std::string_view kSchemaVersion = "1";

// Throws ValidationError when the record violates a ResponseSet invariant.
ResponseSet response_set_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ResponseSet& rs);

// Reads a JSONL response file. Malformed JSON throws ParseError; records
// that parse but violate an invariant are collected in `rejects`.
ResponseCorpus parse_response_file(const std::filesystem::path& path,
                                   std::string_view schema_version = kSchemaVersion);
ResponseCorpus parse_response_lines(std::string_view content,
                                    std::string_view schema_version = kSchemaVersion);

// Score from free text: a JSON "score" field, else the last "score<sep><int>",
// else a bare integer ending the final line. Out-of-range values are dropped.
std::optional<int> extract_score(std::string_view raw, int label_min, int label_max);

Prediction majority_prediction(const ResponseSet& rs);
Prediction first_sample_prediction(const ResponseSet& rs);
Prediction predict(const ResponseSet& rs, PredictionRule rule);

}  // namespace uq
