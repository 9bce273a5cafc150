#include "uq/response.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <spdlog/spdlog.h>

#include "uq/error.hpp"

namespace uq {

using nlohmann::json;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kZeroShot:
      return "zero_shot";
    case Strategy::kZeroShotCot:
      return "zero_shot_cot";
    case Strategy::kFewShotCot:
      return "few_shot_cot";
  }
  return "zero_shot";
}

std::optional<Strategy> strategy_from_string(std::string_view s) {
  if (s == "zero_shot") return Strategy::kZeroShot;
  if (s == "zero_shot_cot") return Strategy::kZeroShotCot;
  if (s == "few_shot_cot") return Strategy::kFewShotCot;
  return std::nullopt;
}

std::string ConfigKey::label() const {
  return model + "|" + question + "|" + std::string(to_string(strategy));
}

std::vector<std::optional<int>> ResponseSet::scores() const {
  std::vector<std::optional<int>> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.score);
  return out;
}

namespace {

template <typename T>
T required(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    throw ValidationError(std::string("missing field \"") + key + "\"");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("field \"") + key + "\" has the wrong type");
  }
}

std::string optional_text(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw ValidationError(std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ResponseSet response_set_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("record is not a JSON object");

  ResponseSet rs;
  rs.item_id = required<std::string>(j, "item_id");
  rs.config.model = required<std::string>(j, "model");
  rs.config.question = required<std::string>(j, "question");
  auto strategy = required<std::string>(j, "strategy");
  auto parsed = strategy_from_string(strategy);
  if (!parsed) throw ValidationError("unknown strategy \"" + strategy + "\"");
  rs.config.strategy = *parsed;
  rs.gold = required<int>(j, "gold");
  rs.label_min = required<int>(j, "label_min");
  rs.label_max = required<int>(j, "label_max");
  if (rs.label_min > rs.label_max) throw ValidationError("label_min > label_max");
  if (rs.gold < rs.label_min || rs.gold > rs.label_max) {
    throw ValidationError("gold " + std::to_string(rs.gold) + " outside label range");
  }

  auto samples = j.find("samples");
  if (samples == j.end() || !samples->is_array()) {
    throw ValidationError("missing field \"samples\"");
  }
  if (samples->size() < 2) throw ValidationError("N < 2");

  for (std::size_t i = 0; i < samples->size(); ++i) {
    const json& s = (*samples)[i];
    if (!s.is_object()) throw ValidationError("sample " + std::to_string(i) + " is not an object");
    GradingSample gs;
    gs.sample_index = i;
    gs.rationale = optional_text(s, "rationale");
    gs.raw = optional_text(s, "raw");
    auto score = s.find("score");
    if (score != s.end() && !score->is_null()) {
      if (!score->is_number_integer()) {
        throw ValidationError("sample " + std::to_string(i) + " score is not an integer");
      }
      int v = score->get<int>();
      if (v < rs.label_min || v > rs.label_max) {
        throw ValidationError("sample " + std::to_string(i) + " score " + std::to_string(v) +
                              " outside label range [" + std::to_string(rs.label_min) + ", " +
                              std::to_string(rs.label_max) + "]");
      }
      gs.score = v;
    } else if (!gs.raw.empty()) {
      gs.score = extract_score(gs.raw, rs.label_min, rs.label_max);
    }
    rs.samples.push_back(std::move(gs));
  }
  return rs;
}

json to_json(const ResponseSet& rs) {
  json samples = json::array();
  for (const auto& s : rs.samples) {
    samples.push_back({{"score", s.score ? json(*s.score) : json(nullptr)},
                       {"rationale", s.rationale},
                       {"raw", s.raw}});
  }
  return {{"item_id", rs.item_id},
          {"model", rs.config.model},
          {"question", rs.config.question},
          {"strategy", std::string(to_string(rs.config.strategy))},
          {"gold", rs.gold},
          {"label_min", rs.label_min},
          {"label_max", rs.label_max},
          {"samples", std::move(samples)}};
}

ResponseCorpus parse_response_lines(std::string_view content, std::string_view schema_version) {
  if (schema_version != kSchemaVersion) {
    throw Error("unsupported schema version \"" + std::string(schema_version) + "\"");
  }

  std::vector<ResponseSet> parsed;
  ResponseCorpus corpus;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    try {
      parsed.push_back(response_set_from_json(j));
    } catch (const ValidationError& e) {
      std::string id;
      if (j.is_object() && j.contains("item_id") && j["item_id"].is_string()) {
        id = j["item_id"].get<std::string>();
      }
      spdlog::warn("line {}: rejected record {}: {}", line_no, id, e.what());
      corpus.rejects.push_back({line_no, id, e.what()});
    }
  }

  std::stable_sort(parsed.begin(), parsed.end(),
                   [](const ResponseSet& a, const ResponseSet& b) { return a.config < b.config; });
  corpus.sets = std::move(parsed);
  return corpus;
}

ResponseCorpus parse_response_file(const std::filesystem::path& path,
                                   std::string_view schema_version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_response_lines(buf.str(), schema_version);
}

std::optional<int> extract_score(std::string_view raw, int label_min, int label_max) {
  auto in_range = [&](long long v) -> std::optional<int> {
    if (v < label_min || v > label_max) return std::nullopt;
    return static_cast<int>(v);
  };

  // 1. JSON object carrying a "score" field.
  auto open = raw.find('{');
  auto close = raw.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    json j = json::parse(raw.substr(open, close - open + 1), nullptr, false);
    if (!j.is_discarded() && j.is_object()) {
      auto it = j.find("score");
      if (it != j.end() && it->is_number_integer()) return in_range(it->get<long long>());
    }
  }

  const std::string text(raw);

  // 2. Last "score<sep><int>".
  static const std::regex kScorePattern(R"(\bscore\b["']?\s*(?:[:=]|\bis\b)?\s*(-?\d+))",
                                        std::regex::icase);
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), kScorePattern);
       it != std::sregex_iterator(); ++it) {
    last = (*it)[1].str();
  }
  if (last) return in_range(std::stoll(*last));

  // 3. Bare integer closing the final non-empty line.
  auto last_line_end = text.find_last_not_of(" \t\r\n");
  if (last_line_end == std::string::npos) return std::nullopt;
  auto line_start = text.rfind('\n', last_line_end);
  line_start = line_start == std::string::npos ? 0 : line_start + 1;
  const std::string final_line = text.substr(line_start, last_line_end - line_start + 1);
  static const std::regex kTrailing(R"((?:^|[^\w.\-])(-?\d+)\.?$)");
  std::smatch m;
  if (std::regex_search(final_line, m, kTrailing)) {
    try {
      return in_range(std::stoll(m[1].str()));
    } catch (const std::out_of_range&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

Prediction make_prediction(int label, int gold) {
  Prediction p;
  p.label = label;
  p.abs_error = label > gold ? label - gold : gold - label;
  p.correct = p.abs_error == 0;
  return p;
}

}  // namespace

Prediction majority_prediction(const ResponseSet& rs) {
  std::map<int, int> votes;
  for (const auto& s : rs.samples) {
    if (s.score) ++votes[*s.score];
  }
  if (votes.empty()) return make_prediction(rs.label_min, rs.gold);
  // std::map iterates labels ascending, so strict > keeps the lowest tied label.
  int best_label = votes.begin()->first;
  int best_count = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_count) {
      best_label = label;
      best_count = count;
    }
  }
  return make_prediction(best_label, rs.gold);
}

Prediction first_sample_prediction(const ResponseSet& rs) {
  const auto& first = rs.samples.front().score;
  return make_prediction(first ? *first : rs.label_min, rs.gold);
}

Prediction predict(const ResponseSet& rs, PredictionRule rule) {
  return rule == PredictionRule::kMajority ? majority_prediction(rs) : first_sample_prediction(rs);
}

}  // namespace uq
