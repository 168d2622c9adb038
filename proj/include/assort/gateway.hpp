#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "assort/providers.hpp"

namespace assort {

struct GatewayConfig {
  std::string base_url = "http://127.0.0.1:8765";
  double timeout_seconds = 30.0;
  unsigned max_retries = 3;
  // Delay before retry n (0-based) is backoff_seconds * 2^n.
  double backoff_seconds = 0.2;
  std::size_t parallelism = 4;
  std::size_t embed_batch = 64;
  std::size_t nli_batch = 16;
  std::size_t summarize_input_budget = 1024;

  // Applies ASSORT_MODEL_URL when set.
  GatewayConfig with_environment() const;
};

struct EmbedResult {
  std::vector<EmbeddingVector> vectors;
  std::size_t dim = 0;
  std::string model;
  std::size_t attempts = 0;
};

struct SummarizeResult {
  std::string summary;
  std::string model;
  std::size_t attempts = 0;
};

struct NliResult {
  std::vector<NliDistribution> probs;
  std::string model;
  std::size_t attempts = 0;
};

// Blocking client for the inference sidecar's /v1 endpoints. Every
// response is schema-validated before it is returned; transport failures,
// 429 and 5xx answers are retried with exponential backoff. Safe for
// concurrent use.
class GatewayClient {
 public:
  explicit GatewayClient(GatewayConfig config);

  const GatewayConfig& config() const { return config_; }

  // /v1/embed {texts} -> {dim, vectors, model?}. Batched by embed_batch.
  EmbedResult remote_embed(std::span<const std::string> texts,
                           std::optional<std::size_t> expected_dim = std::nullopt) const;
  // /v1/summarize {text, max_tokens} -> {summary, model}. The text is cut
  // to summarize_input_budget tokens before sending.
  SummarizeResult remote_summarize(std::string_view text, std::size_t max_tokens) const;
  // /v1/nli {premise, hypotheses} -> {probs: [[entail, contradict, neutral]]}.
  // Hypotheses are sent in nli_batch chunks with at most `parallelism`
  // requests in flight; results are joined in input order.
  NliResult remote_nli(std::string_view premise, std::span<const std::string> hypotheses) const;
  // /v1/health; false on any failure.
  bool healthy() const;

  std::size_t requests_sent() const { return requests_.load(); }

 private:
  nlohmann::json post(const std::string& path, const nlohmann::json& body, std::size_t& attempts) const;

  GatewayConfig config_;
  mutable std::atomic<std::size_t> requests_{0};
};

class RemoteSummarizer final : public SummarizerProvider {
 public:
  explicit RemoteSummarizer(const GatewayClient& client) : client_(client) {}
  std::string identity() const override { return "remote:" + client_.config().base_url; }
  std::size_t input_token_budget() const override { return client_.config().summarize_input_budget; }
  std::string summarize(std::string_view text, std::size_t max_tokens) const override;

 private:
  const GatewayClient& client_;
};

class RemoteNli final : public NliProvider {
 public:
  explicit RemoteNli(const GatewayClient& client) : client_(client) {}
  std::string identity() const override { return "remote:" + client_.config().base_url; }
  std::vector<NliDistribution> infer(std::string_view premise,
                                     std::span<const std::string> hypotheses) const override;

 private:
  const GatewayClient& client_;
};

}  // namespace assort
