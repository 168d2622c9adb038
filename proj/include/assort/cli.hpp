#pragma once

#include <filesystem>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "assort/config.hpp"
#include "assort/featurizer.hpp"
#include "assort/gateway.hpp"
#include "assort/providers.hpp"
#include "assort/types.hpp"

namespace assort {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2, kExitData = 3, kExitProvider = 4 };

// Parses argv (without the program name) and runs one subcommand.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::string run_id;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string started;   // UTC, ISO 8601
  std::string finished;
  std::vector<std::string> artifacts;

  nlohmann::json to_json() const;
  void write(const std::filesystem::path& path) const;
};

struct Providers {
  std::shared_ptr<GatewayClient> client;
  std::unique_ptr<EmbeddingProvider> embedder;
  std::unique_ptr<SummarizerProvider> summarizer;
  std::unique_ptr<NliProvider> nli;
};

// Deterministic stubs for all three when `stub` is set; otherwise the
// configured embedding backing plus the sidecar. With `indirect`, the
// sidecar must answer its health check.
Providers make_providers(const AppConfig& config, bool stub, bool indirect);

Featurizer make_featurizer(const AppConfig& config);

// {"post": id, "system": ..., "selected": [...], "scores": [...]}
nlohmann::json summary_to_json(const Summary& summary, std::string_view system);

// Standalone page listing each post's sentences in order, with selected
// ones wrapped in <mark class="assort-summary">. Byte-stable.
std::string render_html(std::span<const AnswerPost> posts, std::span<const Summary> summaries, std::string_view system);

std::string html_escape(std::string_view text);

}  // namespace assort
