#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "assort/corpus.hpp"
#include "assort/error.hpp"
#include "assort/html.hpp"
#include "support.hpp"

using namespace assort;
using namespace assort::testing;

namespace {

std::set<std::string> ids_of(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

void check_partition(const LabeledCorpus& corpus, const DataSplit& split) {
  std::multiset<std::string> all;
  all.insert(split.train.begin(), split.train.end());
  all.insert(split.dev.begin(), split.dev.end());
  all.insert(split.test.begin(), split.test.end());
  std::multiset<std::string> expected;
  for (const AnswerPost& p : corpus.posts) expected.insert(p.id);
  CHECK(all == expected);
}

}  // namespace

TEST_SUITE("html") {
  TEST_CASE("inline code sentence") {
    const auto s = parse_post_html("<p>Use <code>git revert</code>.</p>");
    REQUIRE(s.size() == 1);
    CHECK(s[0].has_inline_code);
    CHECK(s[0].text == "Use git revert.");
    CHECK_FALSE(s[0].is_bold);
  }

  TEST_CASE("code block adjacency") {
    const auto s = parse_post_html("<p>Do X.</p><pre>code</pre><p>Then Y.</p>");
    REQUIRE(s.size() == 2);
    CHECK(s[0].precedes_code_block);
    CHECK_FALSE(s[0].follows_code_block);
    CHECK(s[1].follows_code_block);
    CHECK_FALSE(s[1].precedes_code_block);
    CHECK(s[0].text == "Do X.");
    CHECK(s[1].text == "Then Y.");
  }

  TEST_CASE("three paragraphs with bold span and two-item list") {
    const std::string html =
        "<p>You can read the file lazily. Use a <b>context manager</b> so it is closed.</p>\n"
        "<ul><li>Open the file. Iterate over it.</li><li>Process each line.</li></ul>\n"
        "<p>This keeps memory flat.</p>\n"
        "<pre><code>with open(p) as f:\n    for line in f: pass</code></pre>\n"
        "<p>Note the <code>with</code> block. It matters.</p>";
    const auto s = parse_post_html(html);

    struct Expected {
      std::string text;
      bool bold, code, list_first, precedes, follows;
    };
    const std::vector<Expected> expected = {
        {"You can read the file lazily.", false, false, false, false, false},
        {"Use a context manager so it is closed.", true, false, false, false, false},
        {"Open the file.", false, false, true, false, false},
        {"Iterate over it.", false, false, false, false, false},
        {"Process each line.", false, false, true, false, false},
        {"This keeps memory flat.", false, false, false, true, false},
        {"Note the with block.", false, true, false, false, true},
        {"It matters.", false, false, false, false, false},
    };
    REQUIRE(s.size() == expected.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      CAPTURE(i);
      CHECK(s[i].index == i);
      CHECK(s[i].total_in_post == expected.size());
      CHECK(s[i].text == expected[i].text);
      CHECK(s[i].is_bold == expected[i].bold);
      CHECK(s[i].has_inline_code == expected[i].code);
      CHECK(s[i].is_list_item_first == expected[i].list_first);
      CHECK(s[i].precedes_code_block == expected[i].precedes);
      CHECK(s[i].follows_code_block == expected[i].follows);
    }
  }

  TEST_CASE("sentence order follows the prose order and parsing is pure") {
    const std::string html =
        "<p>Alpha one. Beta two?</p><p>Gamma three! Delta <b>four</b>.</p><ol><li>Epsilon five.</li></ol>";
    const auto a = parse_post_html(html);
    const auto b = parse_post_html(html);
    CHECK(a == b);
    std::string joined;
    for (const Sentence& s : a) joined += (joined.empty() ? "" : " ") + s.text;
    CHECK(joined == "Alpha one. Beta two? Gamma three! Delta four. Epsilon five.");
  }

  TEST_CASE("no prose") {
    CHECK(parse_post_html("<pre><code>x = 1</code></pre>").empty());
    CHECK(parse_post_html("").empty());
  }

  TEST_CASE("unclosed tags are tolerated") {
    const auto s = parse_post_html("<p>First part. <b>Second part.");
    REQUIRE(s.size() == 2);
    CHECK(s[1].is_bold);
  }

  TEST_CASE("entities decode") { CHECK(decode_entities("a &lt; b &amp;&amp; c &gt; d") == "a < b && c > d"); }
}

TEST_SUITE("corpus") {
  TEST_CASE("two-question file") {
    std::istringstream in(
        R"({"kind":"q","id":"q1","title":"How to undo a commit","tags":["git"],"type":"howto"}
{"kind":"q","id":"q2","title":"What is a closure","tags":["javascript"],"type":"conceptual"}
{"kind":"a","id":"a1","qid":"q1","html":"<p>Use git revert. It is safe.</p>","gold":[0]}
{"kind":"a","id":"a2","qid":"q1","html":"<p>Reset also works.</p>","gold":[]}
{"kind":"a","id":"a3","qid":"q2","html":"<p>A closure captures scope.</p>","gold":[0]}
)");
    const LabeledCorpus c = parse_corpus(in);
    CHECK(c.questions.size() == 2);
    REQUIRE(c.posts.size() == 3);
    CHECK(c.posts[0].sentences.size() == 2);
    CHECK(c.posts[0].gold_summary == std::vector<std::size_t>{0});
    CHECK(c.question_of(c.posts[2]).id == "q2");
    CHECK(post_type(c, c.posts[1]) == QuestionType::kHowTo);
  }

  TEST_CASE("empty file") {
    std::istringstream in("");
    const LabeledCorpus c = parse_corpus(in);
    CHECK(c.questions.empty());
    CHECK(c.posts.empty());
  }

  TEST_CASE("gold index out of range names the line") {
    std::istringstream in(
        R"({"kind":"q","id":"q1","title":"t","tags":[],"type":"howto"}
{"kind":"a","id":"a1","qid":"q1","html":"<p>One. Two.</p>","gold":[2]}
)");
    try {
      parse_corpus(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  TEST_CASE("dangling question id") {
    std::istringstream in(R"({"kind":"a","id":"a1","qid":"nope","html":"<p>One.</p>","gold":[0]})");
    CHECK_THROWS_AS(parse_corpus(in), DataError);
  }

  TEST_CASE("malformed line names the line") {
    std::istringstream in("{\"kind\":\"q\",\"id\":\"q1\",\"title\":\"t\",\"tags\":[],\"type\":\"howto\"}\n{not json\n");
    try {
      parse_corpus(in);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  TEST_CASE("missing file") { CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), DataError); }

  TEST_CASE("write and parse round trip") {
    const LabeledCorpus c = fixture_corpus();
    std::ostringstream out;
    write_corpus(out, c);
    std::istringstream in(out.str());
    const LabeledCorpus back = parse_corpus(in);
    REQUIRE(back.posts.size() == c.posts.size());
    for (std::size_t i = 0; i < c.posts.size(); ++i) {
      CHECK(back.posts[i].id == c.posts[i].id);
      CHECK(back.posts[i].sentences == c.posts[i].sentences);
      CHECK(back.posts[i].gold_summary == c.posts[i].gold_summary);
    }
  }

  TEST_CASE("fixture corpus shape") {
    const LabeledCorpus c = fixture_corpus();
    CHECK(c.questions.size() == 50);
    CHECK(c.posts.size() == 50);
    std::size_t sentences = 0, gold = 0;
    for (const AnswerPost& p : c.posts) {
      sentences += p.sentences.size();
      gold += p.gold_summary->size();
    }
    CHECK(sentences == 330);
    CHECK(gold == 120);
  }

  TEST_CASE("split 8:1:1 inside each type") {
    const LabeledCorpus c = synthetic_corpus(10);
    const DataSplit s = split_corpus(c, {}, 7);
    CHECK(s.train.size() == 24);
    CHECK(s.dev.size() == 3);
    CHECK(s.test.size() == 3);
    check_partition(c, s);
    for (QuestionType t : kAllQuestionTypes) {
      auto of_type = [&](const std::vector<std::string>& ids) {
        return std::count_if(ids.begin(), ids.end(),
                             [&](const std::string& id) { return post_type(c, *c.find_post(id)) == t; });
      };
      CHECK(of_type(s.train) == 8);
      CHECK(of_type(s.dev) == 1);
      CHECK(of_type(s.test) == 1);
    }
  }

  TEST_CASE("split is deterministic and seed dependent") {
    const LabeledCorpus c = synthetic_corpus(10);
    const DataSplit a = split_corpus(c, {}, 7);
    const DataSplit b = split_corpus(c, {}, 7);
    CHECK(a.train == b.train);
    CHECK(a.dev == b.dev);
    CHECK(a.test == b.test);
    int differing = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
      if (ids_of(split_corpus(c, {}, seed).train) != ids_of(split_corpus(c, {}, seed + 100).train)) ++differing;
    CHECK(differing >= 18);
  }

  TEST_CASE("split rejects thin types") {
    CHECK_THROWS_AS(split_corpus(synthetic_corpus(9), {}, 1), DataError);
  }

  TEST_CASE("kfold partitions the corpus") {
    const LabeledCorpus c = synthetic_corpus(7, 3);
    const std::vector<AnswerPost> twenty(c.posts.begin(), c.posts.begin() + 20);
    LabeledCorpus c20 = c;
    c20.posts = twenty;
    const auto folds = kfold(c20, 10, 3);
    REQUIRE(folds.size() == 10);
    std::multiset<std::string> tested;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      CHECK(folds[i].test.size() == 2);
      check_partition(c20, folds[i]);
      CHECK(folds[i].dev == folds[(i + 1) % 10].test);
      tested.insert(folds[i].test.begin(), folds[i].test.end());
    }
    std::multiset<std::string> all;
    for (const AnswerPost& p : c20.posts) all.insert(p.id);
    CHECK(tested == all);

    const auto again = kfold(c20, 10, 3);
    for (std::size_t i = 0; i < folds.size(); ++i) CHECK(again[i].test == folds[i].test);
  }

  TEST_CASE("kfold errors") {
    const LabeledCorpus c = synthetic_corpus(1);
    CHECK_THROWS_AS(kfold(c, 4, 1), DataError);
    CHECK_THROWS_AS(kfold(c, 1, 1), UsageError);
  }

  TEST_CASE("subsample counts and identity") {
    const LabeledCorpus c = synthetic_corpus(34);
    LabeledCorpus hundred = c;
    hundred.posts.resize(100);
    const LabeledCorpus full = subsample(hundred, 1.0, 5);
    std::set<std::string> a, b;
    for (const AnswerPost& p : hundred.posts) a.insert(p.id);
    for (const AnswerPost& p : full.posts) b.insert(p.id);
    CHECK(a == b);
    CHECK(subsample(hundred, 0.2, 5).posts.size() == 20);
    CHECK(subsample(hundred, 0.15, 5).posts.size() == 15);
    CHECK(subsample(hundred, 0.011, 5).posts.size() == 2);
    const LabeledCorpus small = subsample(hundred, 0.2, 5);
    for (const auto& [qid, q] : small.questions) {
      CHECK(std::any_of(small.posts.begin(), small.posts.end(),
                        [&](const AnswerPost& p) { return p.question_id == qid; }));
    }
    CHECK_THROWS_AS(subsample(hundred, 0.0, 5), UsageError);
    CHECK_THROWS_AS(subsample(hundred, 1.5, 5), UsageError);
  }

  TEST_CASE("subsample nests across fractions") {
    const LabeledCorpus c = synthetic_corpus(20);
    std::set<std::string> previous;
    for (double f : {0.1, 0.2, 0.3, 0.5, 0.8, 1.0}) {
      std::set<std::string> ids;
      for (const AnswerPost& p : subsample(c, f, 11).posts) ids.insert(p.id);
      CHECK(std::includes(ids.begin(), ids.end(), previous.begin(), previous.end()));
      previous = ids;
    }
  }

  TEST_CASE("subsample covers every type early") {
    const LabeledCorpus c = synthetic_corpus(20);
    const LabeledCorpus s = subsample(c, 0.05, 2);
    std::set<QuestionType> types;
    for (const AnswerPost& p : s.posts) types.insert(*post_type(s, p));
    CHECK(types.size() == 3);
  }
}
