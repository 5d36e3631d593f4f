#include "snare/llm_gateway.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "snare/errors.hpp"
#include "snare/util.hpp"

namespace snare {

std::string prompt_digest(const std::string& system, const std::string& user) {
  return util::fnv1a_hex(system + "\x1e" + user);
}

// --- ReplayBackend ---------------------------------------------------------

std::string ReplayBackend::complete(const LlmRequest& request) {
  std::string digest = prompt_digest(request.system, request.user);
  auto it = responses_.find(digest);
  if (it == responses_.end()) throw ReplayMiss(request.tag, digest);
  return it->second;
}

void ReplayBackend::add(const std::string& digest, const std::string& response) {
  auto it = responses_.find(digest);
  if (it != responses_.end() && it->second != response)
    throw ValidationError("replay log: conflicting responses for digest " + digest);
  responses_[digest] = response;
}

// --- HttpBackend -----------------------------------------------------------

HttpBackend::HttpBackend(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

std::string HttpBackend::complete(const LlmRequest& request) {
  httplib::Client client(base_url_);
  client.set_connection_timeout(10);
  client.set_read_timeout(120);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  nlohmann::json body;
  body["model"] = request.config.model;
  body["messages"] = nlohmann::json::array();
  if (!request.system.empty())
    body["messages"].push_back({{"role", "system"}, {"content", request.system}});
  body["messages"].push_back({{"role", "user"}, {"content", request.user}});
  body["temperature"] = request.config.temperature;
  body["top_p"] = request.config.top_p;
  body["max_tokens"] = request.config.max_tokens;

  auto res = client.Post("/chat/completions", headers, body.dump(), "application/json");
  if (!res) throw TransientBackendError("http: no response (timeout or connection failure)");
  if (res->status == 429 || res->status >= 500)
    throw TransientBackendError("http: status " + std::to_string(res->status));
  if (res->status != 200)
    throw BackendUnavailable("http: status " + std::to_string(res->status) + ": " + res->body);

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailable(std::string("http: malformed response JSON: ") + e.what());
  }
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw BackendUnavailable("http: response missing choices[0].message.content");
  }
}

// --- LlmGateway ------------------------------------------------------------

LlmExchange LlmGateway::complete(const LlmRequest& request) {
  if (util::trim(request.user).empty())
    throw ValidationError("llm request: empty user prompt (tag=" + request.tag + ")");

  std::string digest = prompt_digest(request.system, request.user);
  util::Rng jitter_rng(request.config.seed ^
                       std::stoull(digest.substr(0, 15), nullptr, 16));

  int attempt = 0;
  auto start = std::chrono::steady_clock::now();
  for (;;) {
    ++attempt;
    try {
      std::string text = backend_->complete(request);
      auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - start)
                         .count();
      return LlmExchange{request, std::move(text), elapsed, attempt, digest};
    } catch (const TransientBackendError& e) {
      if (attempt > request.config.max_retries)
        throw BackendUnavailable("retries exhausted after " + std::to_string(attempt) +
                                 " attempts (tag=" + request.tag + "): " + e.what());
      double jitter = 0.5 + jitter_rng.uniform_real();
      auto delay = static_cast<std::int64_t>(
          request.config.backoff_base_ms * (1 << (attempt - 1)) * jitter);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
  }
}

std::vector<BatchResult> LlmGateway::complete_batch(const std::vector<LlmRequest>& requests) {
  std::vector<BatchResult> results(requests.size());
  if (requests.empty()) return results;

  int parallelism = 1;
  for (const auto& r : requests) parallelism = std::max(parallelism, r.config.parallelism);
  auto workers = static_cast<std::size_t>(
      std::min<std::size_t>(static_cast<std::size_t>(parallelism), requests.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        results[i].exchange = complete(requests[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  for (auto& t : threads) t.join();
  return results;
}

// --- replay log ------------------------------------------------------------

void record_log(const std::vector<LlmExchange>& exchanges, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("replay log: cannot open for writing: " + path);
  for (const auto& e : exchanges) {
    nlohmann::ordered_json j;
    j["digest"] = e.prompt_digest;
    j["tag"] = e.request.tag;
    j["request"] = {{"system", e.request.system}, {"user", e.request.user}};
    j["response"] = e.response_text;
    out << j.dump() << "\n";
  }
}

std::shared_ptr<ReplayBackend> load_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("replay log: cannot open: " + path);
  auto backend = std::make_shared<ReplayBackend>();
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("replay log: line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("digest") || !j.contains("response"))
      throw ParseError("replay log: line " + std::to_string(lineno) +
                       ": missing digest or response");
    backend->add(j["digest"].get<std::string>(), j["response"].get<std::string>());
  }
  return backend;
}

}  // namespace snare
