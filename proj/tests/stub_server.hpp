#pragma once

#include <algorithm>
#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

// Eigen must precede httplib: <resolv.h> defines a _res macro that breaks
// Eigen's headers.
#include <Eigen/Dense>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "stub_provider.hpp"

namespace testing {

// In-process HTTP service speaking the provider wire format, backed by the
// deterministic stub. `fail_first` requests answer 503 before succeeding.
class StubServer {
 public:
  explicit StubServer(int fail_first = 0, std::size_t max_batch = 64) : fail_left_(fail_first) {
    server_.Post("/v1/embed", [this, max_batch](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (fail_left_-- > 0) {
        res.status = 503;
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      const auto texts = body.at("texts").get<std::vector<std::string>>();
      if (texts.size() > max_batch) {
        res.status = 413;
        return;
      }
      max_seen_ = std::max<std::size_t>(max_seen_, texts.size());
      std::lock_guard lock(mu_);
      res.set_content(nlohmann::json{{"embeddings", stub_.embed(texts)}}.dump(), "application/json");
    });
    server_.Post("/v1/nli", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (fail_left_-- > 0) {
        res.status = 503;
        return;
      }
      auto body = nlohmann::json::parse(req.body);
      std::vector<uq::SentencePair> pairs;
      for (const auto& p : body.at("pairs")) {
        pairs.push_back({p.at("premise").get<std::string>(), p.at("hypothesis").get<std::string>()});
      }
      std::lock_guard lock(mu_);
      res.set_content(nlohmann::json{{"entail_probs", stub_.entail(pairs)}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int requests() const { return requests_; }
  std::size_t max_seen() const { return max_seen_; }

 private:
  httplib::Server server_;
  testing::StubProvider stub_;
  std::mutex mu_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> fail_left_;
  std::atomic<std::size_t> max_seen_{0};
};

}  // namespace testing
