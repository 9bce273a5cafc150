#pragma once

#include <chrono>
#include <string>
#include <vector>

namespace uq {

struct ProviderEndpoint {
  std::string base_url;
  int timeout_ms = 30000;
  int max_batch = 32;
  int max_parallel = 4;
  // Recorded in cache keys and run metadata; the service itself is opaque.
  std::string model_id = "unspecified";
  int max_retries = 3;
  std::chrono::milliseconds backoff{200};

  void validate() const;
};

struct SentencePair {
  std::string premise;
  std::string hypothesis;
};

// Source of embeddings and entailment probabilities.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string model_id() const = 0;
  // One vector per text, same order.
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
  // P(entail | premise, hypothesis) per pair, same order.
  virtual std::vector<double> entail(const std::vector<SentencePair>& pairs) = 0;
};

// Client for POST {base_url}/embed and {base_url}/nli. Requests are split
// into batches of max_batch and issued up to max_parallel at a time; each
// batch is retried with exponential backoff before a ProviderError.
class HttpProvider final : public Provider {
 public:
  explicit HttpProvider(ProviderEndpoint ep);

  std::string model_id() const override { return ep_.model_id; }
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;
  std::vector<double> entail(const std::vector<SentencePair>& pairs) override;

  const ProviderEndpoint& endpoint() const { return ep_; }

 private:
  std::string post(const std::string& route, const std::string& body) const;

  ProviderEndpoint ep_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // path component of base_url, no trailing '/'
};

}  // namespace uq
