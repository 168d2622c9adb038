#include "assort/indirect.hpp"

#include <set>

#include "assort/error.hpp"
#include "assort/html.hpp"
#include "assort/text.hpp"

namespace assort {

std::string StubSummarizer::summarize(std::string_view text, std::size_t /*max_tokens*/) const {
  std::string out;
  std::size_t taken = 0;
  for (const auto& [begin, end] : split_sentences(text)) {
    const std::string_view s = trim(text.substr(begin, end - begin));
    if (s.empty()) continue;
    if (!out.empty()) out += ' ';
    out += s;
    if (++taken == 3) break;
  }
  return out;
}

std::vector<NliDistribution> StubNli::infer(std::string_view premise, std::span<const std::string> hypotheses) const {
  const auto premise_tokens = word_tokens(premise);
  const std::set<std::string> covered(premise_tokens.begin(), premise_tokens.end());
  std::vector<NliDistribution> out;
  out.reserve(hypotheses.size());
  for (const std::string& h : hypotheses) {
    const auto tokens = word_tokens(h);
    const std::set<std::string> distinct(tokens.begin(), tokens.end());
    std::size_t hits = 0;
    for (const std::string& t : distinct) hits += covered.count(t);
    const double c = distinct.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(distinct.size());
    out.push_back({(c + 0.01) / 1.03, 0.01 / 1.03, (1.0 - c + 0.01) / 1.03});
  }
  return out;
}

std::string post_prose(const AnswerPost& post) {
  std::string out;
  for (const Sentence& s : post.sentences) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

AbstractiveSummary generate_summary(const SummarizerProvider& provider, std::string_view post_text,
                                    std::size_t max_tokens) {
  if (count_tokens(post_text) == 0) throw DataError("cannot summarize a post without prose");
  const std::string input = truncate_tokens(post_text, provider.input_token_budget());
  AbstractiveSummary s;
  s.text = provider.summarize(input, max_tokens);
  s.provider = provider.identity();
  if (count_tokens(s.text) == 0) throw ProviderError("summarizer " + s.provider + " returned an empty summary");
  return s;
}

AbstractiveSummary generate_summary(const SummarizerProvider& provider, const AnswerPost& post,
                                    std::size_t max_tokens) {
  AbstractiveSummary s = generate_summary(provider, post_prose(post), max_tokens);
  s.post_id = post.id;
  return s;
}

Summary select_entailed(const NliProvider& nli, const AbstractiveSummary& summary,
                        std::span<const Sentence> sentences) {
  if (summary.text.empty()) throw UsageError("entailment selection needs a non-empty summary");
  Summary out;
  out.post_id = summary.post_id;
  if (sentences.empty()) return out;
  std::vector<std::string> hypotheses;
  hypotheses.reserve(sentences.size());
  for (const Sentence& s : sentences) hypotheses.push_back(s.text);
  const std::vector<NliDistribution> probs = nli.infer(summary.text, hypotheses);
  if (probs.size() != hypotheses.size())
    throw ProviderError("nli provider " + nli.identity() + " returned " + std::to_string(probs.size()) +
                        " rows for " + std::to_string(hypotheses.size()) + " hypotheses");
  out.scores.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!probs[i].valid()) throw ProviderError("nli provider " + nli.identity() + " returned an invalid distribution");
    out.scores.push_back(probs[i].entail);
    if (probs[i].entailed()) out.selected.push_back(i);
  }
  return out;
}

Summary summarize_indirect(const AnswerPost& post, const SummarizerProvider& summarizer, const NliProvider& nli,
                           std::size_t max_tokens) {
  const AbstractiveSummary summary = generate_summary(summarizer, post, max_tokens);
  Summary out = select_entailed(nli, summary, post.sentences);
  out.post_id = post.id;
  return out;
}

}  // namespace assort
