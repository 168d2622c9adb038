#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace assort {

// A D-dimensional sentence vector.
using EmbeddingVector = std::vector<double>;

// Probabilities that a premise entails / contradicts / is neutral toward a
// hypothesis. Valid instances sum to 1 within 1e-6.
struct NliDistribution {
  double entail = 0.0;
  double contradict = 0.0;
  double neutral = 0.0;

  bool valid(double tolerance = 1e-6) const;
  // Strict dominance: entail beats both alternatives, ties lose.
  bool entailed() const { return entail > contradict && entail > neutral; }
};

struct AbstractiveSummary {
  std::string text;
  std::string post_id;
  std::string provider;
};

// Sentence-embedding backing. Implementations must be safe for concurrent
// embed() calls.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  // Identity of the backing model; trained artifacts pin it.
  virtual std::string fingerprint() const = 0;
  // One vector per input, same order. Throws ProviderError.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
  // Makes every text available without further remote calls and returns
  // how many were newly cached. Backings without a cache return 0.
  virtual std::size_t warm(std::span<const std::string> texts) const;
};

// Abstractive summarizer backing.
class SummarizerProvider {
 public:
  virtual ~SummarizerProvider() = default;
  virtual std::string identity() const = 0;
  // Whitespace-token budget for the input; longer inputs are cut from the
  // end so the leading text survives.
  virtual std::size_t input_token_budget() const = 0;
  virtual std::string summarize(std::string_view text, std::size_t max_tokens) const = 0;
};

// Natural-language-inference backing.
class NliProvider {
 public:
  virtual ~NliProvider() = default;
  virtual std::string identity() const = 0;
  virtual std::vector<NliDistribution> infer(std::string_view premise,
                                             std::span<const std::string> hypotheses) const = 0;
};

// Keeps the first `budget` whitespace-delimited tokens of `text`.
std::string truncate_tokens(std::string_view text, std::size_t budget);
std::size_t count_tokens(std::string_view text);

}  // namespace assort
