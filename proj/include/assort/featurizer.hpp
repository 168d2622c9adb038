#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "assort/types.hpp"

namespace assort {

inline constexpr std::size_t kNumPatterns = 19;
inline constexpr std::size_t kNumDomainFeatures = 28;

// Sentence-initial discourse phrases, in their fixed dimension order.
extern const std::array<std::string_view, kNumPatterns> kLinguisticPatterns;

// The 28-dim domain feature vector. Layout:
//   [0, 19)  linguistic pattern flags
//   19 entity overlap, 20 comparative, 21 superlative, 22 imperative,
//   23 position, 24 code adjacency, 25 inline code, 26 bold, 27 list step
struct DomainFeatures {
  static constexpr std::size_t kEntityOverlap = 19;
  static constexpr std::size_t kComparative = 20;
  static constexpr std::size_t kSuperlative = 21;
  static constexpr std::size_t kImperative = 22;
  static constexpr std::size_t kPosition = 23;
  static constexpr std::size_t kCodeAdjacent = 24;
  static constexpr std::size_t kInlineCode = 25;
  static constexpr std::size_t kBold = 26;
  static constexpr std::size_t kListStep = 27;

  std::array<double, kNumDomainFeatures> values{};

  double operator[](std::size_t i) const { return values[i]; }
  bool operator==(const DomainFeatures&) const = default;
};

struct Lexicons {
  std::set<std::string> imperative_verbs;
  std::set<std::string> comparatives;
  std::set<std::string> superlatives;
  std::set<std::string> suffix_exclusions;
  // Extra known software entities, lowercase; empty by default.
  std::set<std::string> software_entities;

  // The lists shipped in resources/, compiled in.
  static const Lexicons& defaults();

  // Replaces individual lists from plain-text files (one token per line,
  // '#' comments). Empty paths keep the defaults.
  static Lexicons load(const std::filesystem::path& imperative_verbs,
                       const std::filesystem::path& comparatives = {},
                       const std::filesystem::path& superlatives = {},
                       const std::filesystem::path& suffix_exclusions = {},
                       const std::filesystem::path& software_entities = {});
};

std::set<std::string> parse_word_list(std::string_view text);

// Recognizes software entities in question titles/tags and in sentences.
class EntityRecognizer {
 public:
  virtual ~EntityRecognizer() = default;
  virtual std::set<std::string> question_entities(const QuestionRecord& question) const = 0;
  virtual std::set<std::string> sentence_entities(const QuestionRecord& question,
                                                  const Sentence& sentence) const = 0;
};

// Lexicon matcher: question tags, identifier-shaped tokens (camelCase,
// snake_case, dotted, c++/c#-style), and any configured known entities.
// Matching is case-insensitive on whole tokens.
class LexiconEntityRecognizer final : public EntityRecognizer {
 public:
  explicit LexiconEntityRecognizer(std::set<std::string> known = {}) : known_(std::move(known)) {}
  std::set<std::string> question_entities(const QuestionRecord& question) const override;
  std::set<std::string> sentence_entities(const QuestionRecord& question, const Sentence& sentence) const override;

  static bool identifier_shaped(std::string_view raw_token);

 private:
  std::set<std::string> known_;
};

class Featurizer {
 public:
  Featurizer();
  explicit Featurizer(Lexicons lexicons, std::shared_ptr<const EntityRecognizer> recognizer = nullptr);

  // |E_q ∩ E_s| / |E_q|, or 0 when the question has no entities.
  double entity_overlap(const QuestionRecord& question, const Sentence& sentence) const;
  bool has_comparative(std::string_view text) const;
  bool has_superlative(std::string_view text) const;
  bool is_imperative(std::string_view text) const;
  static std::array<bool, kNumPatterns> match_patterns(std::string_view text);
  // (position, code_adjacent)
  static std::pair<double, bool> structural(const Sentence& sentence);
  // (inline_code, bold, list_step)
  static std::array<bool, 3> stylistic(const Sentence& sentence);

  DomainFeatures build(const QuestionRecord& question, const Sentence& sentence) const;

  const Lexicons& lexicons() const { return lexicons_; }

 private:
  Lexicons lexicons_;
  std::shared_ptr<const EntityRecognizer> recognizer_;
};

}  // namespace assort
