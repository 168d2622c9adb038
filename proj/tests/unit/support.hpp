#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "assort/corpus.hpp"
#include "assort/providers.hpp"
#include "assort/question_classifier.hpp"
#include "assort/random.hpp"
#include "assort/types.hpp"

namespace assort::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(ASSORT_FIXTURE_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("assort-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Always answers with the same distribution.
class FixedClassifier final : public QuestionClassifier {
 public:
  explicit FixedClassifier(TypeDistribution d) : d_(d) {}
  TypeDistribution classify(const QuestionRecord&) const override { return d_; }

 private:
  TypeDistribution d_;
};

// One-hot on the question's gold type.
class GoldTypeClassifier final : public QuestionClassifier {
 public:
  TypeDistribution classify(const QuestionRecord& q) const override {
    return TypeDistribution::one_hot(q.gold_type.value_or(QuestionType::kHowTo));
  }
};

// NLI answers looked up by hypothesis text.
class TableNli final : public NliProvider {
 public:
  explicit TableNli(std::map<std::string, NliDistribution> table) : table_(std::move(table)) {}
  std::string identity() const override { return "table-nli"; }
  std::vector<NliDistribution> infer(std::string_view, std::span<const std::string> hypotheses) const override {
    std::vector<NliDistribution> out;
    for (const std::string& h : hypotheses) out.push_back(table_.at(h));
    return out;
  }

 private:
  std::map<std::string, NliDistribution> table_;
};

inline AnswerPost plain_post(const std::string& id, const std::string& qid, const std::vector<std::string>& texts,
                             std::vector<std::size_t> gold = {}) {
  AnswerPost p;
  p.id = id;
  p.question_id = qid;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    Sentence s;
    s.index = i;
    s.text = texts[i];
    s.total_in_post = texts.size();
    p.sentences.push_back(s);
  }
  p.gold_summary = std::move(gold);
  return p;
}

// `per_type` posts for each question type, one answer per question, every
// post with `sentences` sentences and gold {0}.
inline LabeledCorpus synthetic_corpus(std::size_t per_type, std::size_t sentences = 4) {
  LabeledCorpus c;
  for (QuestionType t : kAllQuestionTypes) {
    for (std::size_t i = 0; i < per_type; ++i) {
      const std::string qid = std::string(to_string(t)) + std::to_string(i);
      c.questions[qid] = QuestionRecord{qid, "title " + qid, {}, t};
      std::vector<std::string> texts;
      for (std::size_t s = 0; s < sentences; ++s) texts.push_back("Sentence " + std::to_string(s) + " of " + qid + ".");
      c.posts.push_back(plain_post(qid + "a", qid, texts, {0}));
    }
  }
  return c;
}

// Keyword-separable titles: each type has its own cue phrases, topics are
// shared. Cycles through the types so the classes stay balanced.
inline std::vector<LabeledTitle> synthetic_titles(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> topics = {
      "a python list",   "a git branch",   "java hashmap",      "a docker image", "the npm cache",
      "a sql join",      "a react hook",   "a bash loop",       "a css grid",     "rust lifetimes",
      "a go channel",    "c++ templates",  "a kotlin coroutine", "the jvm heap",  "a regex group"};
  static const std::vector<std::string> howto = {"How to reverse", "How do I copy", "How can I merge",
                                                 "Best way to sort", "How to delete"};
  static const std::vector<std::string> conceptual = {"What is", "Why does", "Difference between",
                                                      "What does", "Meaning of"};
  static const std::vector<std::string> bugfix = {"error", "exception thrown by", "crash in",
                                                  "segfault with", "failure in"};
  std::mt19937_64 rng(seed);
  std::vector<LabeledTitle> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& topic = topics[rng() % topics.size()];
    switch (i % 3) {
      case 0: out.push_back({howto[rng() % howto.size()] + " " + topic, QuestionType::kHowTo}); break;
      case 1: out.push_back({conceptual[rng() % conceptual.size()] + " " + topic, QuestionType::kConceptual}); break;
      default: out.push_back({"Unexpected " + bugfix[rng() % bugfix.size()] + " " + topic, QuestionType::kBugFixing});
    }
  }
  return out;
}

inline LabeledCorpus fixture_corpus() { return load_corpus(fixture("so_fixture.jsonl")); }

}  // namespace assort::testing
