#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace uq {

std::string sha256_hex(std::string_view data);

// Content-addressed store of provider results. Entries live in memory and,
// when a directory is configured, as one JSON blob per key on disk.
// Readers may run concurrently; writers are serialized.
class SimilarityCache {
 public:
  SimilarityCache() = default;
  explicit SimilarityCache(std::filesystem::path dir);

  // UQ_CACHE_DIR when set, else `fallback` (memory-only when both are empty).
  static SimilarityCache from_env(const std::optional<std::filesystem::path>& fallback = {});

  static std::string embedding_key(std::string_view model_id, std::string_view text);
  static std::string entailment_key(std::string_view model_id, std::string_view premise,
                                    std::string_view hypothesis);

  std::optional<std::vector<double>> embedding(const std::string& key) const;
  std::optional<double> entailment(const std::string& key) const;
  void put_embedding(const std::string& key, std::vector<double> v);
  void put_entailment(const std::string& key, double p);

  const std::optional<std::filesystem::path>& dir() const { return dir_; }
  std::size_t size() const;

 private:
  std::optional<nlohmann::json> load(const std::string& key) const;
  void store(const std::string& key, nlohmann::json blob);

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mu_;
  mutable std::unordered_map<std::string, nlohmann::json> entries_;
};

}  // namespace uq
