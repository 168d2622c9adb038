#include "assort/gateway.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <future>
#include <thread>

#include <httplib.h>

#include "assort/error.hpp"

namespace assort {

using nlohmann::json;

GatewayConfig GatewayConfig::with_environment() const {
  GatewayConfig out = *this;
  if (const char* url = std::getenv("ASSORT_MODEL_URL"); url != nullptr && *url != '\0') out.base_url = url;
  return out;
}

GatewayClient::GatewayClient(GatewayConfig config) : config_(std::move(config)) {
  if (!(config_.timeout_seconds > 0)) throw UsageError("gateway timeout must be positive");
  if (config_.parallelism == 0) config_.parallelism = 1;
  if (config_.embed_batch == 0) config_.embed_batch = 1;
  if (config_.nli_batch == 0) config_.nli_batch = 1;
}

json GatewayClient::post(const std::string& path, const json& body, std::size_t& attempts) const {
  const std::string payload = body.dump();
  std::string last_error;
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  for (unsigned attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double delay = config_.backoff_seconds * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    attempts = attempt + 1;
    ++requests_;
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw ProviderError(path + ": HTTP " + std::to_string(res->status) + ": " + res->body);
    if (res->body.empty()) throw ProviderError(path + ": protocol error: empty response body");
    try {
      return json::parse(res->body);
    } catch (const json::parse_error& e) {
      throw ProviderError(path + ": protocol error: " + e.what());
    }
  }
  throw ProviderError(path + " failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

namespace {

// Runs task(i) for i in [0, n) with at most `width` in flight, returning
// results in index order.
template <typename Result, typename Task>
std::vector<Result> fan_out(std::size_t n, std::size_t width, Task task) {
  std::vector<Result> results(n);
  for (std::size_t start = 0; start < n; start += width) {
    const std::size_t end = std::min(n, start + width);
    if (end - start == 1) {
      results[start] = task(start);
      continue;
    }
    std::vector<std::future<Result>> wave;
    for (std::size_t i = start; i < end; ++i) wave.push_back(std::async(std::launch::async, task, i));
    for (std::size_t i = start; i < end; ++i) results[i] = wave[i - start].get();
  }
  return results;
}

std::string model_of(const json& response) {
  auto it = response.find("model");
  return it != response.end() && it->is_string() ? it->get<std::string>() : std::string();
}

}  // namespace

EmbedResult GatewayClient::remote_embed(std::span<const std::string> texts,
                                        std::optional<std::size_t> expected_dim) const {
  EmbedResult out;
  if (texts.empty()) return out;
  const std::size_t batches = (texts.size() + config_.embed_batch - 1) / config_.embed_batch;
  auto parts = fan_out<EmbedResult>(batches, config_.parallelism, [&](std::size_t b) {
    const auto chunk = texts.subspan(b * config_.embed_batch,
                                     std::min(config_.embed_batch, texts.size() - b * config_.embed_batch));
    EmbedResult part;
    const json response = post("/v1/embed", json{{"texts", std::vector<std::string>(chunk.begin(), chunk.end())}},
                               part.attempts);
    if (!response.contains("dim") || !response["dim"].is_number_unsigned() || !response.contains("vectors") ||
        !response["vectors"].is_array())
      throw ProviderError("/v1/embed: protocol error: expected {dim, vectors}");
    part.dim = response["dim"].get<std::size_t>();
    part.model = model_of(response);
    if (expected_dim && part.dim != *expected_dim)
      throw ProviderError("/v1/embed: dimension mismatch: service returned " + std::to_string(part.dim) +
                          ", expected " + std::to_string(*expected_dim));
    if (response["vectors"].size() != chunk.size())
      throw ProviderError("/v1/embed: count mismatch: sent " + std::to_string(chunk.size()) + " texts, received " +
                          std::to_string(response["vectors"].size()) + " vectors");
    for (const json& row : response["vectors"]) {
      if (!row.is_array() || row.size() != part.dim)
        throw ProviderError("/v1/embed: vector length differs from advertised dim " + std::to_string(part.dim));
      EmbeddingVector v;
      v.reserve(part.dim);
      for (const json& x : row) {
        if (!x.is_number() || !std::isfinite(x.get<double>()))
          throw ProviderError("/v1/embed: non-finite vector component");
        v.push_back(x.get<double>());
      }
      part.vectors.push_back(std::move(v));
    }
    return part;
  });
  for (EmbedResult& part : parts) {
    if (out.vectors.empty()) {
      out.dim = part.dim;
      out.model = part.model;
    } else if (part.dim != out.dim) {
      throw ProviderError("/v1/embed: inconsistent dimensions across batches");
    }
    out.attempts = std::max(out.attempts, part.attempts);
    for (auto& v : part.vectors) out.vectors.push_back(std::move(v));
  }
  return out;
}

SummarizeResult GatewayClient::remote_summarize(std::string_view text, std::size_t max_tokens) const {
  SummarizeResult out;
  const std::string input = truncate_tokens(text, config_.summarize_input_budget);
  const json response = post("/v1/summarize", json{{"text", input}, {"max_tokens", max_tokens}}, out.attempts);
  if (!response.contains("summary") || !response["summary"].is_string())
    throw ProviderError("/v1/summarize: protocol error: expected {summary, model}");
  out.summary = response["summary"].get<std::string>();
  if (out.summary.find_first_not_of(" \t\r\n") == std::string::npos)
    throw ProviderError("/v1/summarize: protocol error: empty summary");
  out.model = model_of(response);
  return out;
}

NliResult GatewayClient::remote_nli(std::string_view premise, std::span<const std::string> hypotheses) const {
  NliResult out;
  if (hypotheses.empty()) return out;
  const std::size_t batches = (hypotheses.size() + config_.nli_batch - 1) / config_.nli_batch;
  auto parts = fan_out<NliResult>(batches, config_.parallelism, [&](std::size_t b) {
    const auto chunk = hypotheses.subspan(b * config_.nli_batch,
                                          std::min(config_.nli_batch, hypotheses.size() - b * config_.nli_batch));
    NliResult part;
    const json response =
        post("/v1/nli",
             json{{"premise", std::string(premise)},
                  {"hypotheses", std::vector<std::string>(chunk.begin(), chunk.end())}},
             part.attempts);
    if (!response.contains("probs") || !response["probs"].is_array())
      throw ProviderError("/v1/nli: protocol error: expected {probs}");
    if (response["probs"].size() != chunk.size())
      throw ProviderError("/v1/nli: count mismatch: sent " + std::to_string(chunk.size()) + " hypotheses, received " +
                          std::to_string(response["probs"].size()) + " rows");
    part.model = model_of(response);
    for (const json& row : response["probs"]) {
      if (!row.is_array() || row.size() != 3 || !row[0].is_number() || !row[1].is_number() || !row[2].is_number())
        throw ProviderError("/v1/nli: validation error: each row must be [entail, contradict, neutral]");
      NliDistribution d{row[0].get<double>(), row[1].get<double>(), row[2].get<double>()};
      if (!d.valid())
        throw ProviderError("/v1/nli: validation error: row is not a probability distribution (sum " +
                            std::to_string(d.entail + d.contradict + d.neutral) + ")");
      part.probs.push_back(d);
    }
    return part;
  });
  for (NliResult& part : parts) {
    if (out.model.empty()) out.model = part.model;
    out.attempts = std::max(out.attempts, part.attempts);
    out.probs.insert(out.probs.end(), part.probs.begin(), part.probs.end());
  }
  return out;
}

bool GatewayClient::healthy() const {
  httplib::Client client(config_.base_url);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(std::min(config_.timeout_seconds, 5.0)));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  auto res = client.Get("/v1/health");
  if (!res || res->status != 200) return false;
  try {
    const json body = json::parse(res->body);
    return body.value("ok", false);
  } catch (const json::exception&) {
    return false;
  }
}

std::string RemoteSummarizer::summarize(std::string_view text, std::size_t max_tokens) const {
  return client_.remote_summarize(text, max_tokens).summary;
}

std::vector<NliDistribution> RemoteNli::infer(std::string_view premise, std::span<const std::string> hypotheses) const {
  return client_.remote_nli(premise, hypotheses).probs;
}

}  // namespace assort
