#ifndef SNARE_LLM_GATEWAY_HPP
#define SNARE_LLM_GATEWAY_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace snare {

struct GenerationConfig {
  std::string model = "llama3-8b";
  double temperature = 0.6;
  double top_p = 0.9;
  int max_tokens = 250;
  std::uint64_t seed = 0;
  int parallelism = 8;
  int max_retries = 3;
  int backoff_base_ms = 250;  // exponential backoff base; tests set this to ~1
};

struct LlmRequest {
  std::string system;
  std::string user;
  GenerationConfig config;
  std::string tag;  // stage label, e.g. "scout.stage1"
};

struct LlmExchange {
  LlmRequest request;
  std::string response_text;
  std::int64_t latency_ms = 0;
  int attempt = 1;
  std::string prompt_digest;  // pure function of system+user
};

// Per-item batch result; one failure never aborts the batch.
struct BatchResult {
  std::optional<LlmExchange> exchange;
  std::string error;
  bool ok() const { return exchange.has_value(); }
};

std::string prompt_digest(const std::string& system, const std::string& user);

// Text-generation backend. Implementations must be safe for concurrent use.
// complete() throws TransientBackendError for retryable failures; the gateway
// handles retry. Any other exception is fatal for that request.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const LlmRequest& request) = 0;
};

// Deterministic backend serving recorded responses keyed by prompt digest.
class ReplayBackend : public Backend {
 public:
  std::string complete(const LlmRequest& request) override;
  void add(const std::string& digest, const std::string& response);
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::string, std::string> responses_;
};

// OpenAI-compatible chat-completions client. Retries are classified here
// (429/5xx/timeouts -> TransientBackendError); backoff lives in the gateway.
class HttpBackend : public Backend {
 public:
  HttpBackend(std::string base_url, std::string api_key);
  std::string complete(const LlmRequest& request) override;

 private:
  std::string base_url_;
  std::string api_key_;
};

// Bounded-parallel batch execution with retry/backoff on top of a Backend.
class LlmGateway {
 public:
  explicit LlmGateway(std::shared_ptr<Backend> backend) : backend_(std::move(backend)) {}

  // Retries TransientBackendError up to max_retries with exponential backoff;
  // jitter is derived from the request seed so timing never affects content.
  LlmExchange complete(const LlmRequest& request);

  // Results in request order regardless of completion order; at most
  // config.parallelism requests in flight.
  std::vector<BatchResult> complete_batch(const std::vector<LlmRequest>& requests);

 private:
  std::shared_ptr<Backend> backend_;
};

// Replay log jsonl:
// {"digest": string, "tag": string, "request": {"system","user"}, "response": string}
void record_log(const std::vector<LlmExchange>& exchanges, const std::string& path);
std::shared_ptr<ReplayBackend> load_log(const std::string& path);

}  // namespace snare

#endif  // SNARE_LLM_GATEWAY_HPP
