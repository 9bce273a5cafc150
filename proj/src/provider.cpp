#include "uq/provider.hpp"

#include <algorithm>
#include <future>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "uq/error.hpp"

namespace uq {

using nlohmann::json;

void ProviderEndpoint::validate() const {
  if (base_url.empty()) throw ValidationError("provider base_url is empty");
  if (timeout_ms <= 0) throw ValidationError("provider timeout_ms must be positive");
  if (max_batch < 1) throw ValidationError("provider max_batch must be >= 1");
  if (max_parallel < 1) throw ValidationError("provider max_parallel must be >= 1");
  if (max_retries < 0) throw ValidationError("provider max_retries must be >= 0");
}

HttpProvider::HttpProvider(ProviderEndpoint ep) : ep_(std::move(ep)) {
  ep_.validate();
  const auto scheme_end = ep_.base_url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("provider URL needs a scheme: " + ep_.base_url);
  }
  const auto path_start = ep_.base_url.find('/', scheme_end + 3);
  origin_ = ep_.base_url.substr(0, path_start);
  if (path_start != std::string::npos) {
    path_prefix_ = ep_.base_url.substr(path_start);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
}

std::string HttpProvider::post(const std::string& route, const std::string& body) const {
  const std::string path = path_prefix_ + route;
  std::string last_error;
  for (int attempt = 0; attempt <= ep_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(ep_.backoff * (1 << (attempt - 1)));
    httplib::Client client(origin_);
    const auto timeout = std::chrono::milliseconds(ep_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      return res->body;
    }
    spdlog::warn("provider {}{} attempt {} failed: {}", origin_, path, attempt + 1, last_error);
  }
  throw ProviderError("provider " + origin_ + path + " failed after " +
                      std::to_string(ep_.max_retries + 1) + " attempts: " + last_error);
}

namespace {

// Runs `fn(begin, end)` over [0, n) in chunks of `batch`, at most `parallel`
// chunks in flight. Exceptions propagate after in-flight work finishes.
template <typename Fn>
void for_each_batch(std::size_t n, std::size_t batch, std::size_t parallel, Fn fn) {
  std::vector<std::pair<std::size_t, std::size_t>> chunks;
  for (std::size_t b = 0; b < n; b += batch) chunks.emplace_back(b, std::min(n, b + batch));
  for (std::size_t wave = 0; wave < chunks.size(); wave += parallel) {
    std::vector<std::future<void>> inflight;
    const std::size_t wave_end = std::min(chunks.size(), wave + parallel);
    for (std::size_t c = wave; c < wave_end; ++c) {
      inflight.push_back(std::async(std::launch::async, [&, c] {
        try {
          fn(chunks[c].first, chunks[c].second);
        } catch (const json::exception& e) {
          throw ProviderError(std::string("provider returned malformed payload: ") + e.what());
        }
      }));
    }
    for (auto& f : inflight) f.wait();
    for (auto& f : inflight) f.get();
  }
}

json parse_body(const std::string& body, const char* route) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ProviderError(std::string("provider ") + route + " returned a non-JSON body");
  }
  return j;
}

}  // namespace

std::vector<std::vector<double>> HttpProvider::embed(const std::vector<std::string>& texts) {
  std::vector<std::vector<double>> out(texts.size());
  for_each_batch(texts.size(), ep_.max_batch, ep_.max_parallel,
                 [&](std::size_t begin, std::size_t end) {
                   json req = {{"texts", std::vector<std::string>(texts.begin() + begin,
                                                                  texts.begin() + end)}};
                   json res = parse_body(post("/embed", req.dump()), "/embed");
                   auto it = res.find("embeddings");
                   if (it == res.end() || !it->is_array() || it->size() != end - begin) {
                     throw ProviderError("provider /embed returned a wrong-length response");
                   }
                   for (std::size_t i = begin; i < end; ++i) {
                     out[i] = (*it)[i - begin].get<std::vector<double>>();
                   }
                 });
  for (const auto& v : out) {
    if (v.size() != out.front().size() || v.empty()) {
      throw ProviderError("provider /embed returned inconsistent dimensions");
    }
  }
  return out;
}

std::vector<double> HttpProvider::entail(const std::vector<SentencePair>& pairs) {
  std::vector<double> out(pairs.size());
  for_each_batch(pairs.size(), ep_.max_batch, ep_.max_parallel,
                 [&](std::size_t begin, std::size_t end) {
                   json items = json::array();
                   for (std::size_t i = begin; i < end; ++i) {
                     items.push_back({{"premise", pairs[i].premise},
                                      {"hypothesis", pairs[i].hypothesis}});
                   }
                   json res = parse_body(post("/nli", json{{"pairs", items}}.dump()), "/nli");
                   auto it = res.find("entail_probs");
                   if (it == res.end() || !it->is_array() || it->size() != end - begin) {
                     throw ProviderError("provider /nli returned a wrong-length response");
                   }
                   for (std::size_t i = begin; i < end; ++i) {
                     const double p = (*it)[i - begin].get<double>();
                     if (!(p >= 0.0 && p <= 1.0)) {
                       throw ProviderError("provider /nli returned probability outside [0,1]");
                     }
                     out[i] = p;
                   }
                 });
  return out;
}

}  // namespace uq
