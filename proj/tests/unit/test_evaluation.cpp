#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "assort/corpus.hpp"
#include "assort/embedding.hpp"
#include "assort/evaluation.hpp"
#include "support.hpp"

using namespace assort;
using namespace assort::testing;

namespace {

PredictorFactory constant_factory(std::function<std::vector<std::size_t>(const AnswerPost&)> pick) {
  return [pick](const DataSplit&, std::size_t) -> Predictor {
    return [pick](const QuestionRecord&, const AnswerPost& post) {
      Summary s;
      s.post_id = post.id;
      s.selected = pick(post);
      s.scores.assign(post.sentences.size(), 0.0);
      return s;
    };
  };
}

// Six posts with hand-chosen gold sets, two per type.
LabeledCorpus six_posts() {
  LabeledCorpus c;
  const std::vector<std::pair<QuestionType, std::vector<std::size_t>>> spec = {
      {QuestionType::kHowTo, {0, 2}},      {QuestionType::kHowTo, {1}},      {QuestionType::kConceptual, {0}},
      {QuestionType::kConceptual, {2, 3}}, {QuestionType::kBugFixing, {0, 1}}, {QuestionType::kBugFixing, {3}}};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const std::string qid = "q" + std::to_string(i);
    c.questions[qid] = QuestionRecord{qid, "title", {}, spec[i].first};
    c.posts.push_back(plain_post("p" + std::to_string(i), qid, {"S0.", "S1.", "S2.", "S3."}, spec[i].second));
  }
  return c;
}

EnsembleConfig quick_config() {
  EnsembleConfig c;
  c.fnn.learning_rate = 1e-3;
  c.fnn.batch_size = 32;
  c.fnn.epochs = 15;
  c.fnn.hidden = 8;
  c.seed = 2;
  return c;
}

std::map<std::string, std::vector<std::size_t>> selections(const EvalReport& r) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (const FoldResult& f : r.folds)
    for (const PostOutcome& p : f.posts) out[p.post_id] = p.selected;
  return out;
}

}  // namespace

TEST_SUITE("evaluation") {
  TEST_CASE("lead-k baseline") {
    const AnswerPost five = plain_post("p", "q", {"a.", "b.", "c.", "d.", "e."});
    const AnswerPost two = plain_post("p", "q", {"a.", "b."});
    CHECK(lead_k_baseline(five, 3).selected == std::vector<std::size_t>{0, 1, 2});
    CHECK(lead_k_baseline(two, 3).selected == std::vector<std::size_t>{0, 1});
    CHECK(lead_k_baseline(five, 0).selected.empty());
  }

  TEST_CASE("perfect and empty predictors") {
    const LabeledCorpus c = six_posts();
    const auto splits = kfold(c, 3, 1);
    const EvalReport perfect =
        evaluate(c, splits, constant_factory([](const AnswerPost& p) { return *p.gold_summary; }), {}, "gold");
    CHECK(perfect.aggregate.f1 == 1.0);
    const EvalReport nothing =
        evaluate(c, splits, constant_factory([](const AnswerPost&) { return std::vector<std::size_t>{}; }), {},
                 "none");
    CHECK(nothing.aggregate.f1 == 0.0);
    CHECK(nothing.aggregate.precision == 0.0);
  }

  TEST_CASE("report equals hand-pooled counts") {
    const LabeledCorpus c = six_posts();
    const auto splits = kfold(c, 3, 4);
    EvalOptions options;
    options.run_id = "abc";
    options.seed = 4;
    const EvalReport r = evaluate(c, splits, lead_k_factory(2), options, "lead2");

    // lead-2 picks {0,1}; |G|, |M|, |G ∩ M| per post, worked out by hand.
    const std::map<std::string, Counts> by_hand = {{"p0", {2, 2, 1}}, {"p1", {1, 2, 1}}, {"p2", {1, 2, 1}},
                                                   {"p3", {2, 2, 0}}, {"p4", {2, 2, 2}}, {"p5", {1, 2, 0}}};
    REQUIRE(r.folds.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      Counts expected;
      for (const std::string& id : splits[k].test) expected += by_hand.at(id);
      CHECK(r.folds[k].fold == k);
      CHECK(r.folds[k].metrics.counts == expected);
      CHECK(r.folds[k].posts.size() == splits[k].test.size());
    }
    CHECK(r.aggregate.counts == Counts{9, 12, 5});
    CHECK(r.aggregate.precision == 5.0 / 12.0);
    CHECK(r.aggregate.recall == 5.0 / 9.0);
    CHECK(r.aggregate.f1 == doctest::Approx(2.0 * 5.0 / (12.0 + 9.0)).epsilon(1e-15));
    CHECK(r.run_id == "abc");
    CHECK(r.system == "lead2");
  }

  TEST_CASE("f1 is the harmonic mean in every report") {
    const LabeledCorpus c = fixture_corpus();
    const auto splits = kfold(c, 10, 7);
    for (std::size_t k : {1, 2, 3, 5}) {
      const EvalReport r = evaluate(c, splits, lead_k_factory(k), {}, "lead");
      const double p = r.aggregate.precision, rec = r.aggregate.recall;
      CHECK(std::abs(r.aggregate.f1 - 2 * p * rec / (p + rec)) < 1e-12);
      for (const FoldResult& f : r.folds) {
        const double fp = f.metrics.precision, fr = f.metrics.recall;
        if (fp + fr > 0) CHECK(std::abs(f.metrics.f1 - 2 * fp * fr / (fp + fr)) < 1e-12);
      }
    }
  }

  TEST_CASE("parallel folds match sequential folds") {
    const LabeledCorpus c = fixture_corpus();
    const auto splits = kfold(c, 5, 7);
    const StubEmbedder e(8);
    const Featurizer f;
    const SupervisedContext ctx{&f, &e, nullptr};
    EvalOptions seq, par;
    par.parallelism = 3;
    const EvalReport a = evaluate(c, splits, supervised_factory(c, quick_config(), ctx), seq, "s");
    const EvalReport b = evaluate(c, splits, supervised_factory(c, quick_config(), ctx), par, "s");
    CHECK(selections(a) == selections(b));
    CHECK(a.aggregate == b.aggregate);
  }

  TEST_CASE("no-ensemble equals full under one-hot confidence") {
    const LabeledCorpus c = fixture_corpus();
    const auto splits = kfold(c, 5, 3);
    const StubEmbedder e(8);
    const Featurizer f;
    const SupervisedContext ctx{&f, &e, std::make_shared<GoldTypeClassifier>()};
    EvalOptions options;
    options.run_id = "run";
    const EvalReport full = run_ablation(AblationVariant::kFull, c, splits, quick_config(), ctx, options);
    const EvalReport single = run_ablation(AblationVariant::kNoEnsemble, c, splits, quick_config(), ctx, options);
    CHECK(selections(full) == selections(single));
    CHECK(full.aggregate == single.aggregate);
    CHECK(full.variant == "full");
    CHECK(single.variant == "no-ensemble");
  }

  TEST_CASE("all variants report under one run id") {
    const LabeledCorpus c = fixture_corpus();
    const auto splits = kfold(c, 3, 3);
    const StubEmbedder e(8);
    const Featurizer f;
    const SupervisedContext ctx{&f, &e, nullptr};
    EvalOptions options;
    options.run_id = "one-run";
    std::set<std::string> variants;
    for (AblationVariant v : kAllVariants) {
      const EvalReport r = run_ablation(v, c, splits, quick_config(), ctx, options);
      CHECK(r.run_id == "one-run");
      CHECK(r.system == "assort_s");
      CHECK(r.folds.size() == 3);
      variants.insert(r.variant);
    }
    CHECK(variants.size() == 5);
  }

  TEST_CASE("low-resource curve") {
    const LabeledCorpus c = fixture_corpus();
    const auto splits = kfold(c, 3, 6);
    const StubEmbedder e(8);
    const Featurizer f;
    const SupervisedContext ctx{&f, &e, nullptr};
    EvalOptions options;
    options.run_id = "curve";
    const StubSummarizer summarizer;
    const StubNli nli;
    const PredictorFactory indirect = indirect_factory(summarizer, nli);
    const std::vector<double> fractions = {0.5, 1.0};
    const auto reports = low_resource_curve(c, splits, fractions, quick_config(), ctx, options, &indirect);
    REQUIRE(reports.size() == 3);
    CHECK(reports[0].fraction == 0.5);
    CHECK(reports[1].fraction == 1.0);
    CHECK(reports[2].system == "assort_is");

    const EvalReport plain = evaluate(c, splits, supervised_factory(c, quick_config(), ctx), options, "assort_s");
    CHECK(selections(reports[1]) == selections(plain));
    CHECK(reports[1].aggregate == plain.aggregate);

    const EvalReport is_plain = evaluate(c, splits, indirect, options, "assort_is");
    CHECK(reports[2].aggregate == is_plain.aggregate);
  }

  TEST_CASE("training sets nest across fractions") {
    const LabeledCorpus c = fixture_corpus();
    const auto splits = kfold(c, 10, 6);
    for (const DataSplit& s : splits) {
      std::set<std::string> previous;
      for (double fraction : {0.1, 0.2, 0.4, 0.7, 1.0}) {
        const DataSplit sub = subsample_split(c, s, fraction, 6);
        CHECK(sub.test == s.test);
        CHECK(sub.dev == s.dev);
        const std::set<std::string> ids(sub.train.begin(), sub.train.end());
        CHECK(std::includes(ids.begin(), ids.end(), previous.begin(), previous.end()));
        const std::set<std::string> all(s.train.begin(), s.train.end());
        CHECK(std::includes(all.begin(), all.end(), ids.begin(), ids.end()));
        previous = ids;
      }
      CHECK(previous.size() == s.train.size());
    }
  }

  TEST_CASE("report serialization") {
    const LabeledCorpus c = six_posts();
    const auto splits = kfold(c, 3, 4);
    EvalOptions options;
    options.run_id = "r1";
    options.config_digest = "digest";
    options.seed = 9;
    std::vector<EvalReport> reports = {evaluate(c, splits, lead_k_factory(1), options, "lead1"),
                                       evaluate(c, splits, lead_k_factory(3), options, "lead3", "", 0.5)};
    const EvalReport back = report_from_json(report_to_json(reports[0]));
    CHECK(report_to_json(back) == report_to_json(reports[0]));
    CHECK(report_to_json(reports[0])["schema"] == kReportSchema);

    std::ostringstream jsonl, table;
    write_reports_jsonl(jsonl, reports);
    write_reports_table(table, reports);

    std::istringstream lines(jsonl.str());
    std::vector<nlohmann::json> parsed;
    for (std::string line; std::getline(lines, line);) parsed.push_back(nlohmann::json::parse(line));
    REQUIRE(parsed.size() == 2);

    std::istringstream rows(table.str());
    std::string header;
    std::getline(rows, header);
    for (std::size_t i = 0; i < 2; ++i) {
      std::string system, variant;
      double fraction = 0, p = 0, r = 0, f1 = 0;
      std::size_t folds = 0, gold = 0, pred = 0, overlap = 0;
      rows >> system >> variant >> fraction >> folds >> p >> r >> f1 >> gold >> pred >> overlap;
      const nlohmann::json& agg = parsed[i]["aggregate"];
      CHECK(system == parsed[i]["system"].get<std::string>());
      CHECK(folds == parsed[i]["folds"].size());
      CHECK(gold == agg["gold"].get<std::size_t>());
      CHECK(pred == agg["predicted"].get<std::size_t>());
      CHECK(overlap == agg["overlap"].get<std::size_t>());
      CHECK(p == doctest::Approx(agg["precision"].get<double>()).epsilon(1e-4));
      CHECK(r == doctest::Approx(agg["recall"].get<double>()).epsilon(1e-4));
      CHECK(f1 == doctest::Approx(agg["f1"].get<double>()).epsilon(1e-4));
      CHECK(fraction == parsed[i]["fraction"].get<double>());
    }
    CHECK(table.str().find("averaging: micro") != std::string::npos);
  }
}
