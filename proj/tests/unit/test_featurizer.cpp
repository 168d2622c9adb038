#include <doctest.h>

#include <sstream>

#include "assort/featurizer.hpp"
#include "assort/html.hpp"
#include "assort/random.hpp"
#include "support.hpp"

using namespace assort;
using namespace assort::testing;

namespace {

Sentence sentence(const std::string& text, std::size_t index = 0, std::size_t total = 1) {
  Sentence s;
  s.text = text;
  s.index = index;
  s.total_in_post = total;
  return s;
}

QuestionRecord hash_question() {
  return QuestionRecord{"q", "Differences between a map and a table in Java", {"hashmap", "hashtable"},
                        QuestionType::kConceptual};
}

std::size_t pattern_index(std::string_view phrase) {
  for (std::size_t i = 0; i < kLinguisticPatterns.size(); ++i)
    if (kLinguisticPatterns[i] == phrase) return i;
  return kLinguisticPatterns.size();
}

}  // namespace

TEST_SUITE("featurizer") {
  TEST_CASE("entity overlap") {
    const Featurizer f;
    const QuestionRecord q = hash_question();
    CHECK(f.entity_overlap(q, sentence("A HashMap allows null keys and a Hashtable does not.")) == 1.0);
    CHECK(f.entity_overlap(q, sentence("Prefer HashMap in new code.")) == 0.5);
    CHECK(f.entity_overlap(QuestionRecord{"q", "A question about nothing", {}, std::nullopt},
                           sentence("Use HashMap.")) == 0.0);
  }

  TEST_CASE("entity matching respects token boundaries") {
    const Featurizer f;
    const QuestionRecord q{"q", "Running things", {"test"}, QuestionType::kHowTo};
    CHECK(f.entity_overlap(q, sentence("Take the fastest path.")) == 0.0);
    CHECK(f.entity_overlap(q, sentence("Run the TEST target.")) == 1.0);
  }

  TEST_CASE("identifier-shaped tokens") {
    CHECK(LexiconEntityRecognizer::identifier_shaped("HashMap"));
    CHECK(LexiconEntityRecognizer::identifier_shaped("snake_case"));
    CHECK(LexiconEntityRecognizer::identifier_shaped("node.js"));
    CHECK(LexiconEntityRecognizer::identifier_shaped("c++"));
    CHECK_FALSE(LexiconEntityRecognizer::identifier_shaped("table"));
  }

  TEST_CASE("comparatives") {
    const Featurizer f;
    CHECK(f.has_comparative("the stack is faster because all free memory is contiguous"));
    CHECK_FALSE(f.has_comparative("use the stack"));
    CHECK_FALSE(f.has_comparative("her answer"));
    CHECK(f.has_comparative("This is better than the loop."));
  }

  TEST_CASE("superlatives") {
    const Featurizer f;
    CHECK(f.has_superlative("application/json is the best MIME type for a JSON response"));
    CHECK_FALSE(f.has_superlative("a test case"));
    CHECK(f.has_superlative("the fastest path"));
    CHECK(f.has_superlative("This is the worst option."));
  }

  TEST_CASE("imperatives") {
    const Featurizer f;
    CHECK(f.is_imperative("use git revert commit-id"));
    CHECK_FALSE(f.is_imperative("you should use git revert"));
    CHECK(f.is_imperative("Then, run the migration."));
    CHECK(f.is_imperative("Simply add the flag."));
    CHECK_FALSE(f.is_imperative("The run failed."));
    CHECK_FALSE(f.is_imperative(""));
  }

  TEST_CASE("linguistic patterns") {
    const auto however = Featurizer::match_patterns("However, this breaks on Windows.");
    for (std::size_t i = 0; i < kNumPatterns; ++i) CHECK(however[i] == (i == pattern_index("However,")));
    const auto inner = Featurizer::match_patterns("It is, however, fine.");
    for (bool b : inner) CHECK_FALSE(b);
    const auto other = Featurizer::match_patterns("on the other hand, it works.");
    CHECK(pattern_index("On the other hand,") == 15);
    for (std::size_t i = 0; i < kNumPatterns; ++i) CHECK(other[i] == (i == 15));
    CHECK(Featurizer::match_patterns("Below is the code.")[pattern_index("Below is")]);
    CHECK(Featurizer::match_patterns("  Below is the code.")[pattern_index("Below is")]);
    CHECK_FALSE(Featurizer::match_patterns("However this lacks the comma.")[pattern_index("However,")]);
  }

  TEST_CASE("structural features") {
    CHECK(Featurizer::structural(sentence("x", 0, 5)).first == 0.0);
    CHECK(Featurizer::structural(sentence("x", 2, 5)).first == 0.5);
    CHECK(Featurizer::structural(sentence("x", 4, 5)).first == 1.0);
    CHECK(Featurizer::structural(sentence("x", 0, 1)).first == 0.0);
    Sentence s = sentence("x", 1, 3);
    CHECK_FALSE(Featurizer::structural(s).second);
    s.follows_code_block = true;
    CHECK(Featurizer::structural(s).second);
    s.follows_code_block = false;
    s.precedes_code_block = true;
    CHECK(Featurizer::structural(s).second);
  }

  TEST_CASE("stylistic features pass flags through") {
    Sentence s = sentence("x");
    CHECK(Featurizer::stylistic(s) == std::array<bool, 3>{false, false, false});
    s.has_inline_code = true;
    CHECK(Featurizer::stylistic(s) == std::array<bool, 3>{true, false, false});
    s.is_bold = true;
    s.is_list_item_first = true;
    CHECK(Featurizer::stylistic(s) == std::array<bool, 3>{true, true, true});
  }

  TEST_CASE("neutral sentence mid-post") {
    const Featurizer f;
    const QuestionRecord q{"q", "Memory layout", {}, QuestionType::kConceptual};
    const DomainFeatures d = f.build(q, sentence("It depends on the allocator.", 1, 3));
    for (std::size_t i = 0; i < kNumDomainFeatures; ++i) {
      CAPTURE(i);
      CHECK(d[i] == (i == DomainFeatures::kPosition ? 0.5 : 0.0));
    }
  }

  TEST_CASE("list item with pattern, imperative and inline code") {
    const auto sentences =
        parse_post_html("<p>Two options exist.</p><ol><li>Alternatively, use <code>Map</code>.</li></ol>");
    REQUIRE(sentences.size() == 2);
    const Featurizer f;
    const QuestionRecord q{"q", "Which structure", {}, QuestionType::kHowTo};
    const DomainFeatures d = f.build(q, sentences[1]);
    const std::size_t alt = pattern_index("Alternatively,");
    CHECK(alt == 7);
    for (std::size_t i = 0; i < kNumPatterns; ++i) CHECK(d[i] == (i == alt ? 1.0 : 0.0));
    CHECK(d[DomainFeatures::kImperative] == 1.0);
    CHECK(d[DomainFeatures::kInlineCode] == 1.0);
    CHECK(d[DomainFeatures::kListStep] == 1.0);
    CHECK(d[DomainFeatures::kPosition] == 1.0);
    CHECK(d[DomainFeatures::kBold] == 0.0);
  }

  TEST_CASE("features are pure and bounded over the fixture corpus") {
    const Featurizer f;
    const LabeledCorpus c = fixture_corpus();
    for (const AnswerPost& p : c.posts) {
      const QuestionRecord& q = c.question_of(p);
      for (const Sentence& s : p.sentences) {
        const DomainFeatures a = f.build(q, s);
        CHECK(a == f.build(q, s));
        for (std::size_t i = 0; i < kNumDomainFeatures; ++i) {
          CHECK(a[i] >= 0.0);
          CHECK(a[i] <= 1.0);
          if (i != DomainFeatures::kEntityOverlap && i != DomainFeatures::kPosition)
            CHECK((a[i] == 0.0 || a[i] == 1.0));
        }
      }
    }
  }

  TEST_CASE("lexicon overrides") {
    TempDir dir("lex");
    {
      std::ofstream out(dir / "verbs.txt");
      out << "# custom\nfrobnicate\n";
    }
    const Featurizer f(Lexicons::load(dir / "verbs.txt"));
    CHECK(f.is_imperative("Frobnicate the widget."));
    CHECK_FALSE(f.is_imperative("Use the widget."));
    CHECK(f.has_comparative("the stack is faster because"));
    CHECK(parse_word_list("a\n# c\n B \n\n") == std::set<std::string>{"a", "b"});
  }
}
