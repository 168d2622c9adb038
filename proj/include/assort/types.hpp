#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace assort {

// The three question categories. The enumerator order is the index order
// used by TypeDistribution, the ensemble heads, and every artifact.
enum class QuestionType { kHowTo = 0, kConceptual = 1, kBugFixing = 2 };

inline constexpr std::size_t kNumQuestionTypes = 3;
inline constexpr std::array<QuestionType, kNumQuestionTypes> kAllQuestionTypes = {
    QuestionType::kHowTo, QuestionType::kConceptual, QuestionType::kBugFixing};

constexpr std::size_t type_index(QuestionType t) { return static_cast<std::size_t>(t); }

// Corpus-file spelling: "howto", "conceptual", "bugfix".
std::string_view to_string(QuestionType t);
std::optional<QuestionType> parse_question_type(std::string_view s);

struct QuestionRecord {
  std::string id;
  std::string title;
  std::vector<std::string> tags;
  std::optional<QuestionType> gold_type;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  bool is_bold = false;
  bool has_inline_code = false;
  bool is_list_item_first = false;
  bool precedes_code_block = false;
  bool follows_code_block = false;
  std::size_t total_in_post = 0;

  bool operator==(const Sentence&) const = default;
};

struct AnswerPost {
  std::string id;
  std::string question_id;
  std::vector<Sentence> sentences;
  // Sorted, unique sentence indices; absent for unlabeled posts.
  std::optional<std::vector<std::size_t>> gold_summary;
  // Original HTML, kept for rendering highlighted reports.
  std::string html;
};

struct LabeledCorpus {
  std::map<std::string, QuestionRecord> questions;
  std::vector<AnswerPost> posts;

  const QuestionRecord& question_of(const AnswerPost& post) const;
  const AnswerPost* find_post(std::string_view id) const;
};

struct DataSplit {
  std::vector<std::string> train;
  std::vector<std::string> dev;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

// Extractive summary of one post: selected indices plus the per-sentence
// scores that produced the decision.
struct Summary {
  std::string post_id;
  std::vector<std::size_t> selected;
  std::vector<double> scores;
};

}  // namespace assort
