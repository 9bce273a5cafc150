#include "uq/cache.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "uq/error.hpp"

namespace uq {

namespace fs = std::filesystem;
using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

SimilarityCache::SimilarityCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(*dir_);
}

SimilarityCache SimilarityCache::from_env(const std::optional<fs::path>& fallback) {
  if (const char* env = std::getenv("UQ_CACHE_DIR"); env != nullptr && *env != '\0') {
    return SimilarityCache(fs::path(env));
  }
  if (fallback && !fallback->empty()) return SimilarityCache(*fallback);
  return SimilarityCache();
}

std::string SimilarityCache::embedding_key(std::string_view model_id, std::string_view text) {
  std::string material = "embed";
  material.push_back('\x1f');
  material.append(model_id);
  material.push_back('\x1f');
  material.append(text);
  return sha256_hex(material);
}

std::string SimilarityCache::entailment_key(std::string_view model_id, std::string_view premise,
                                            std::string_view hypothesis) {
  std::string material = "nli";
  for (auto part : {model_id, premise, hypothesis}) {
    material.push_back('\x1f');
    material.append(part);
  }
  return sha256_hex(material);
}

std::optional<json> SimilarityCache::load(const std::string& key) const {
  {
    std::shared_lock lock(mu_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  if (!dir_) return std::nullopt;
  std::ifstream in(*dir_ / (key + ".json"));
  if (!in) return std::nullopt;
  json blob = json::parse(in, nullptr, false);
  if (blob.is_discarded()) return std::nullopt;
  std::unique_lock lock(mu_);
  entries_.emplace(key, blob);
  return blob;
}

void SimilarityCache::store(const std::string& key, json blob) {
  std::unique_lock lock(mu_);
  if (dir_) {
    const fs::path final_path = *dir_ / (key + ".json");
    const fs::path tmp = *dir_ / (key + ".json.tmp");
    {
      std::ofstream out(tmp, std::ios::trunc);
      out << blob.dump();
    }
    fs::rename(tmp, final_path);
  }
  entries_[key] = std::move(blob);
}

std::optional<std::vector<double>> SimilarityCache::embedding(const std::string& key) const {
  auto blob = load(key);
  if (!blob || !blob->contains("embedding")) return std::nullopt;
  return (*blob)["embedding"].get<std::vector<double>>();
}

std::optional<double> SimilarityCache::entailment(const std::string& key) const {
  auto blob = load(key);
  if (!blob || !blob->contains("entail_prob")) return std::nullopt;
  return (*blob)["entail_prob"].get<double>();
}

void SimilarityCache::put_embedding(const std::string& key, std::vector<double> v) {
  store(key, json{{"embedding", std::move(v)}});
}

void SimilarityCache::put_entailment(const std::string& key, double p) {
  store(key, json{{"entail_prob", p}});
}

std::size_t SimilarityCache::size() const {
  std::shared_lock lock(mu_);
  return entries_.size();
}

}  // namespace uq
