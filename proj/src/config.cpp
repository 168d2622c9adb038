#include "assort/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "assort/error.hpp"
#include "assort/serialize.hpp"
#include "assort/text.hpp"

namespace assort {

namespace {

template <typename T>
T parse_unsigned(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw UsageError("config key " + std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  try {
    return io::parse_double(v);
  } catch (const Error&) {
    throw UsageError("config key " + std::string(key) + ": expected a number, got '" + std::string(v) + "'");
  }
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config key " + std::string(key) + ": expected true or false, got '" + std::string(v) + "'");
}

std::string_view backing_name(EmbeddingProviderConfig::Backing b) {
  switch (b) {
    case EmbeddingProviderConfig::Backing::kStub: return "stub";
    case EmbeddingProviderConfig::Backing::kFile: return "file";
    case EmbeddingProviderConfig::Backing::kRemote: return "remote";
  }
  return "remote";
}

struct Entry {
  std::function<std::string(const AppConfig&)> get;
  std::function<void(AppConfig&, std::string_view key, std::string_view value)> set;
};

#define ASSORT_REAL(expr)                                                    \
  Entry {                                                                    \
    [](const AppConfig& c) { return io::format_double(c.expr); },            \
        [](AppConfig& c, std::string_view k, std::string_view v) { c.expr = parse_real(k, v); } \
  }
#define ASSORT_SIZE(expr)                                                    \
  Entry {                                                                    \
    [](const AppConfig& c) { return std::to_string(c.expr); },               \
        [](AppConfig& c, std::string_view k, std::string_view v) {           \
          c.expr = parse_unsigned<std::decay_t<decltype(c.expr)>>(k, v);     \
        }                                                                    \
  }
#define ASSORT_PATH(expr)                                                    \
  Entry {                                                                    \
    [](const AppConfig& c) { return c.expr.string(); },                      \
        [](AppConfig& c, std::string_view, std::string_view v) { c.expr = std::string(v); } \
  }

const std::map<std::string, Entry, std::less<>>& entries() {
  static const std::map<std::string, Entry, std::less<>> table = {
      {"seed", {[](const AppConfig& c) { return std::to_string(c.seed); },
                [](AppConfig& c, std::string_view k, std::string_view v) {
                  c.seed = parse_unsigned<std::uint64_t>(k, v);
                  c.ensemble.seed = c.seed;
                }}},
      {"eval.folds", ASSORT_SIZE(folds)},
      {"eval.fold_parallelism", ASSORT_SIZE(fold_parallelism)},
      {"eval.averaging", {[](const AppConfig& c) { return std::string(to_string(c.averaging)); },
                          [](AppConfig& c, std::string_view, std::string_view v) { c.averaging = parse_averaging(v); }}},
      {"eval.lead_k", ASSORT_SIZE(lead_k)},
      {"eval.curve_fractions",
       {[](const AppConfig& c) {
          std::string out;
          for (double f : c.curve_fractions) out += (out.empty() ? "" : ",") + io::format_double(f);
          return out;
        },
        [](AppConfig& c, std::string_view, std::string_view v) { c.curve_fractions = parse_fractions(v); }}},
      {"split.train", ASSORT_SIZE(split.train)},
      {"split.dev", ASSORT_SIZE(split.dev)},
      {"split.test", ASSORT_SIZE(split.test)},
      {"ensemble.theta", ASSORT_REAL(ensemble.theta)},
      {"ensemble.tune_theta",
       {[](const AppConfig& c) { return std::string(c.ensemble.tune_theta ? "true" : "false"); },
        [](AppConfig& c, std::string_view k, std::string_view v) { c.ensemble.tune_theta = parse_bool(k, v); }}},
      {"ensemble.lead1_fallback",
       {[](const AppConfig& c) { return std::string(c.ensemble.lead1_fallback ? "true" : "false"); },
        [](AppConfig& c, std::string_view k, std::string_view v) { c.ensemble.lead1_fallback = parse_bool(k, v); }}},
      {"ensemble.variant",
       {[](const AppConfig& c) { return std::string(to_string(c.ensemble.variant)); },
        [](AppConfig& c, std::string_view, std::string_view v) { c.ensemble.variant = parse_variant(v); }}},
      {"svm.lambda", ASSORT_REAL(ensemble.svm.lambda)},
      {"svm.epochs", ASSORT_SIZE(ensemble.svm.epochs)},
      {"svm.learning_rate", ASSORT_REAL(ensemble.svm.learning_rate)},
      {"svm.temperature", ASSORT_REAL(ensemble.svm.temperature)},
      {"fnn.learning_rate", ASSORT_REAL(ensemble.fnn.learning_rate)},
      {"fnn.beta1", ASSORT_REAL(ensemble.fnn.beta1)},
      {"fnn.beta2", ASSORT_REAL(ensemble.fnn.beta2)},
      {"fnn.epsilon", ASSORT_REAL(ensemble.fnn.epsilon)},
      {"fnn.batch_size", ASSORT_SIZE(ensemble.fnn.batch_size)},
      {"fnn.epochs", ASSORT_SIZE(ensemble.fnn.epochs)},
      {"fnn.hidden", ASSORT_SIZE(ensemble.fnn.hidden)},
      {"fnn.positive_weight", ASSORT_REAL(ensemble.fnn.positive_weight)},
      {"embedding.backing",
       {[](const AppConfig& c) { return std::string(backing_name(c.embedding.backing)); },
        [](AppConfig& c, std::string_view k, std::string_view v) {
          if (v == "stub") c.embedding.backing = EmbeddingProviderConfig::Backing::kStub;
          else if (v == "file") c.embedding.backing = EmbeddingProviderConfig::Backing::kFile;
          else if (v == "remote") c.embedding.backing = EmbeddingProviderConfig::Backing::kRemote;
          else throw UsageError("config key " + std::string(k) + ": expected stub, file or remote");
        }}},
      {"embedding.dim", ASSORT_SIZE(embedding.dim)},
      {"embedding.stub_seed", ASSORT_SIZE(embedding.seed)},
      {"embedding.file", ASSORT_PATH(embedding.file)},
      {"embedding.cache", ASSORT_PATH(embedding.cache)},
      {"gateway.url", {[](const AppConfig& c) { return c.gateway.base_url; },
                       [](AppConfig& c, std::string_view, std::string_view v) { c.gateway.base_url = std::string(v); }}},
      {"gateway.timeout_seconds", ASSORT_REAL(gateway.timeout_seconds)},
      {"gateway.max_retries", ASSORT_SIZE(gateway.max_retries)},
      {"gateway.backoff_seconds", ASSORT_REAL(gateway.backoff_seconds)},
      {"gateway.parallelism", ASSORT_SIZE(gateway.parallelism)},
      {"gateway.embed_batch", ASSORT_SIZE(gateway.embed_batch)},
      {"gateway.nli_batch", ASSORT_SIZE(gateway.nli_batch)},
      {"gateway.summarize_input_budget", ASSORT_SIZE(gateway.summarize_input_budget)},
      {"indirect.summary_max_tokens", ASSORT_SIZE(summary_max_tokens)},
      {"lexicon.imperative_verbs", ASSORT_PATH(lexicons.imperative_verbs)},
      {"lexicon.comparatives", ASSORT_PATH(lexicons.comparatives)},
      {"lexicon.superlatives", ASSORT_PATH(lexicons.superlatives)},
      {"lexicon.suffix_exclusions", ASSORT_PATH(lexicons.suffix_exclusions)},
      {"lexicon.software_entities", ASSORT_PATH(lexicons.software_entities)},
  };
  return table;
}

#undef ASSORT_REAL
#undef ASSORT_SIZE
#undef ASSORT_PATH

}  // namespace

std::vector<double> parse_fractions(std::string_view list) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::string_view item = trim(list.substr(start, comma == std::string_view::npos ? list.npos : comma - start));
    if (item.empty()) throw UsageError("empty entry in fraction list '" + std::string(list) + "'");
    const double f = parse_real("fractions", item);
    if (!(f > 0.0 && f <= 1.0)) throw UsageError("fraction " + std::string(item) + " is outside (0, 1]");
    out.push_back(f);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void set_config_value(AppConfig& config, std::string_view key, std::string_view value) {
  const auto& table = entries();
  auto it = table.find(key);
  if (it == table.end()) throw UsageError("unknown config key '" + std::string(key) + "'");
  it->second.set(config, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& [key, entry] : entries()) out.push_back(key);
  return out;
}

AppConfig parse_config(std::string_view text) {
  AppConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    try {
      set_config_value(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string canonical_text(const AppConfig& config) {
  std::string out;
  for (const auto& [key, entry] : entries()) out += key + " = " + entry.get(config) + "\n";
  return out;
}

std::string config_digest(const AppConfig& config) { return sha256_hex(canonical_text(config)); }

}  // namespace assort
