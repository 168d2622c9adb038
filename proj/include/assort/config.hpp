#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "assort/corpus.hpp"
#include "assort/embedding.hpp"
#include "assort/ensemble.hpp"
#include "assort/gateway.hpp"
#include "assort/metrics.hpp"

namespace assort {

struct LexiconPaths {
  std::filesystem::path imperative_verbs;
  std::filesystem::path comparatives;
  std::filesystem::path superlatives;
  std::filesystem::path suffix_exclusions;
  std::filesystem::path software_entities;
};

inline EmbeddingProviderConfig remote_embedding() {
  EmbeddingProviderConfig c;
  c.backing = EmbeddingProviderConfig::Backing::kRemote;
  return c;
}

// Every tunable of the toolkit. Files are flat "key = value" lines with
// '#' comments; canonical_text() lists all keys in sorted order.
struct AppConfig {
  std::uint64_t seed = 0;
  std::size_t folds = 10;
  std::size_t fold_parallelism = 1;
  Averaging averaging = Averaging::kMicro;
  std::size_t lead_k = 3;
  SplitRatios split;
  EnsembleConfig ensemble;  // ensemble.seed mirrors `seed`
  EmbeddingProviderConfig embedding = remote_embedding();
  GatewayConfig gateway;
  std::size_t summary_max_tokens = 142;
  std::vector<double> curve_fractions = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  LexiconPaths lexicons;
};

// Unknown keys and malformed values raise UsageError naming the line.
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::filesystem::path& path);

std::string canonical_text(const AppConfig& config);
// SHA-256 of canonical_text().
std::string config_digest(const AppConfig& config);

std::vector<std::string> config_keys();
// Applies one assignment; used by the parser and by command-line overrides.
void set_config_value(AppConfig& config, std::string_view key, std::string_view value);

std::vector<double> parse_fractions(std::string_view list);

}  // namespace assort
