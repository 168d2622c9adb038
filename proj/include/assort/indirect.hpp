#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "assort/providers.hpp"
#include "assort/types.hpp"

namespace assort {

inline constexpr std::size_t kDefaultSummaryTokens = 142;

// Offline summarizer: the first three sentences of the input, joined by
// single spaces.
class StubSummarizer final : public SummarizerProvider {
 public:
  explicit StubSummarizer(std::size_t input_budget = 1024) : budget_(input_budget) {}
  std::string identity() const override { return "stub-summarizer:v1"; }
  std::size_t input_token_budget() const override { return budget_; }
  std::string summarize(std::string_view text, std::size_t max_tokens) const override;

 private:
  std::size_t budget_;
};

// Offline NLI. With c the fraction of the hypothesis's distinct word tokens
// that also occur in the premise (0 for a token-free hypothesis):
//   (entail, contradict, neutral) = (c + 0.01, 0.01, 1 - c + 0.01) / 1.03
// so a hypothesis is entailed exactly when more than half its tokens are
// covered.
class StubNli final : public NliProvider {
 public:
  std::string identity() const override { return "stub-nli:v1"; }
  std::vector<NliDistribution> infer(std::string_view premise, std::span<const std::string> hypotheses) const override;
};

// The prose of a post: sentence texts joined by single spaces.
std::string post_prose(const AnswerPost& post);

// Cuts the input to the provider's token budget from the end, then asks for
// a summary. Throws DataError on empty prose, ProviderError on an empty
// result.
AbstractiveSummary generate_summary(const SummarizerProvider& provider, std::string_view post_text,
                                    std::size_t max_tokens = kDefaultSummaryTokens);
AbstractiveSummary generate_summary(const SummarizerProvider& provider, const AnswerPost& post,
                                    std::size_t max_tokens = kDefaultSummaryTokens);

// Premise = summary text, hypothesis = each sentence. Selects sentences
// whose entailment probability strictly beats both other classes; the
// scores are the entailment probabilities.
Summary select_entailed(const NliProvider& nli, const AbstractiveSummary& summary,
                        std::span<const Sentence> sentences);

Summary summarize_indirect(const AnswerPost& post, const SummarizerProvider& summarizer, const NliProvider& nli,
                           std::size_t max_tokens = kDefaultSummaryTokens);

}  // namespace assort
