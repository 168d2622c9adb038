#include "assort/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <future>

#include "assort/corpus.hpp"
#include "assort/error.hpp"

namespace assort {

using nlohmann::json;

namespace {

FoldResult run_fold(const LabeledCorpus& corpus, const DataSplit& split, std::size_t fold,
                    const PredictorFactory& factory, Averaging averaging) {
  const Predictor predict = factory(split, fold);
  FoldResult result;
  result.fold = fold;
  std::vector<Counts> counts;
  for (const std::string& id : split.test) {
    const AnswerPost* post = corpus.find_post(id);
    if (post == nullptr) throw DataError("test split names unknown post " + id);
    if (!post->gold_summary) throw DataError("test post " + id + " has no gold summary");
    const Summary s = predict(corpus.question_of(*post), *post);
    PostOutcome outcome{id, s.selected, count(*post->gold_summary, s.selected)};
    counts.push_back(outcome.counts);
    result.posts.push_back(std::move(outcome));
  }
  result.metrics = aggregate(counts, averaging);
  return result;
}

}  // namespace

EvalReport evaluate(const LabeledCorpus& corpus, std::span<const DataSplit> splits, const PredictorFactory& factory,
                    const EvalOptions& options, std::string system, std::string variant, double fraction) {
  EvalReport report;
  report.run_id = options.run_id;
  report.system = std::move(system);
  report.variant = std::move(variant);
  report.fraction = fraction;
  report.seed = options.seed;
  report.config_digest = options.config_digest;
  report.averaging = options.averaging;
  report.folds.resize(splits.size());

  const std::size_t width = std::max<std::size_t>(1, options.parallelism);
  for (std::size_t start = 0; start < splits.size(); start += width) {
    const std::size_t end = std::min(splits.size(), start + width);
    if (end - start == 1) {
      report.folds[start] = run_fold(corpus, splits[start], start, factory, options.averaging);
      continue;
    }
    std::vector<std::future<FoldResult>> wave;
    for (std::size_t i = start; i < end; ++i)
      wave.push_back(std::async(std::launch::async, [&, i] {
        return run_fold(corpus, splits[i], i, factory, options.averaging);
      }));
    for (std::size_t i = start; i < end; ++i) report.folds[i] = wave[i - start].get();
  }

  std::vector<Counts> all;
  for (const FoldResult& f : report.folds)
    for (const PostOutcome& p : f.posts) all.push_back(p.counts);
  report.aggregate = aggregate(all, options.averaging);
  return report;
}

Summary lead_k_baseline(const AnswerPost& post, std::size_t k) {
  Summary s;
  s.post_id = post.id;
  const std::size_t n = post.sentences.size();
  s.scores.assign(n, 0.0);
  for (std::size_t i = 0; i < std::min(k, n); ++i) {
    s.selected.push_back(i);
    s.scores[i] = 1.0;
  }
  return s;
}

PredictorFactory lead_k_factory(std::size_t k) {
  return [k](const DataSplit&, std::size_t) -> Predictor {
    return [k](const QuestionRecord&, const AnswerPost& post) { return lead_k_baseline(post, k); };
  };
}

PredictorFactory indirect_factory(const SummarizerProvider& summarizer, const NliProvider& nli,
                                  std::size_t max_tokens) {
  return [&summarizer, &nli, max_tokens](const DataSplit&, std::size_t) -> Predictor {
    return [&summarizer, &nli, max_tokens](const QuestionRecord&, const AnswerPost& post) {
      return summarize_indirect(post, summarizer, nli, max_tokens);
    };
  };
}

PredictorFactory supervised_factory(const LabeledCorpus& corpus, const EnsembleConfig& config,
                                    const SupervisedContext& context) {
  if (context.featurizer == nullptr || context.embedder == nullptr)
    throw UsageError("supervised evaluation needs a featurizer and an embedding provider");
  return [&corpus, config, context](const DataSplit& split, std::size_t) -> Predictor {
    auto bundle = std::make_shared<const TrainedBundle>(
        train_bundle(corpus, split, config, *context.featurizer, *context.embedder));
    return [bundle, context](const QuestionRecord& q, const AnswerPost& post) {
      if (context.classifier)
        return summarize_supervised(*bundle, *context.classifier, q, post, *context.featurizer, *context.embedder);
      return summarize_supervised(*bundle, q, post, *context.featurizer, *context.embedder);
    };
  };
}

EvalReport run_ablation(AblationVariant variant, const LabeledCorpus& corpus, std::span<const DataSplit> splits,
                        const EnsembleConfig& config, const SupervisedContext& context, const EvalOptions& options) {
  EnsembleConfig c = config;
  c.variant = variant;
  return evaluate(corpus, splits, supervised_factory(corpus, c, context), options, "assort_s",
                  std::string(to_string(variant)));
}

DataSplit subsample_split(const LabeledCorpus& corpus, const DataSplit& split, double fraction, std::uint64_t seed) {
  const LabeledCorpus train = select_posts(corpus, split.train);
  const LabeledCorpus kept = subsample(train, fraction, seed);
  DataSplit out = split;
  out.train.clear();
  for (const AnswerPost& p : kept.posts) out.train.push_back(p.id);
  return out;
}

std::vector<EvalReport> low_resource_curve(const LabeledCorpus& corpus, std::span<const DataSplit> splits,
                                           std::span<const double> fractions, const EnsembleConfig& config,
                                           const SupervisedContext& context, const EvalOptions& options,
                                           const PredictorFactory* indirect) {
  std::vector<EvalReport> reports;
  const PredictorFactory full = supervised_factory(corpus, config, context);
  for (double fraction : fractions) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw UsageError("training fractions must lie in (0, 1]");
    PredictorFactory factory = [&, fraction](const DataSplit& split, std::size_t fold) {
      return full(subsample_split(corpus, split, fraction, options.seed), fold);
    };
    reports.push_back(
        evaluate(corpus, splits, factory, options, "assort_s", std::string(to_string(config.variant)), fraction));
  }
  if (indirect != nullptr) reports.push_back(evaluate(corpus, splits, *indirect, options, "assort_is"));
  return reports;
}

// ---------------------------------------------------------------------------

namespace {

json metrics_json(const Metrics& m) {
  return json{{"precision", m.precision}, {"recall", m.recall},       {"f1", m.f1},
              {"gold", m.counts.gold},    {"predicted", m.counts.predicted}, {"overlap", m.counts.overlap}};
}

Metrics metrics_from_json(const json& j) {
  Metrics m;
  m.precision = j.at("precision").get<double>();
  m.recall = j.at("recall").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.counts.gold = j.at("gold").get<std::size_t>();
  m.counts.predicted = j.at("predicted").get<std::size_t>();
  m.counts.overlap = j.at("overlap").get<std::size_t>();
  return m;
}

}  // namespace

json report_to_json(const EvalReport& r) {
  json folds = json::array();
  for (const FoldResult& f : r.folds) {
    json posts = json::array();
    for (const PostOutcome& p : f.posts)
      posts.push_back(json{{"post", p.post_id},
                           {"selected", p.selected},
                           {"gold", p.counts.gold},
                           {"predicted", p.counts.predicted},
                           {"overlap", p.counts.overlap}});
    json fj = metrics_json(f.metrics);
    fj["fold"] = f.fold;
    fj["posts"] = std::move(posts);
    folds.push_back(std::move(fj));
  }
  return json{{"schema", kReportSchema},
              {"run_id", r.run_id},
              {"system", r.system},
              {"variant", r.variant},
              {"fraction", r.fraction},
              {"seed", r.seed},
              {"config_digest", r.config_digest},
              {"averaging", to_string(r.averaging)},
              {"aggregate", metrics_json(r.aggregate)},
              {"folds", std::move(folds)}};
}

EvalReport report_from_json(const json& j) {
  if (j.value("schema", "") != kReportSchema) throw DataError("not an " + std::string(kReportSchema) + " record");
  EvalReport r;
  r.run_id = j.at("run_id").get<std::string>();
  r.system = j.at("system").get<std::string>();
  r.variant = j.at("variant").get<std::string>();
  r.fraction = j.at("fraction").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.config_digest = j.at("config_digest").get<std::string>();
  r.averaging = parse_averaging(j.at("averaging").get<std::string>());
  r.aggregate = metrics_from_json(j.at("aggregate"));
  for (const json& fj : j.at("folds")) {
    FoldResult f;
    f.fold = fj.at("fold").get<std::size_t>();
    f.metrics = metrics_from_json(fj);
    for (const json& pj : fj.at("posts")) {
      PostOutcome p;
      p.post_id = pj.at("post").get<std::string>();
      p.selected = pj.at("selected").get<std::vector<std::size_t>>();
      p.counts = {pj.at("gold").get<std::size_t>(), pj.at("predicted").get<std::size_t>(),
                  pj.at("overlap").get<std::size_t>()};
      f.posts.push_back(std::move(p));
    }
    r.folds.push_back(std::move(f));
  }
  return r;
}

void write_reports_jsonl(std::ostream& out, std::span<const EvalReport> reports) {
  for (const EvalReport& r : reports) out << report_to_json(r).dump() << '\n';
}

void write_reports_table(std::ostream& out, std::span<const EvalReport> reports) {
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-24s %8s %5s %9s %9s %9s %7s %7s %7s\n", "system", "variant", "fraction",
                "folds", "precision", "recall", "f1", "gold", "pred", "overlap");
  out << line;
  for (const EvalReport& r : reports) {
    std::snprintf(line, sizeof line, "%-10s %-24s %8.2f %5zu %9.4f %9.4f %9.4f %7zu %7zu %7zu\n", r.system.c_str(),
                  r.variant.empty() ? "-" : r.variant.c_str(), r.fraction, r.folds.size(), r.aggregate.precision,
                  r.aggregate.recall, r.aggregate.f1, r.aggregate.counts.gold, r.aggregate.counts.predicted,
                  r.aggregate.counts.overlap);
    out << line;
  }
  if (!reports.empty()) out << "averaging: " << to_string(reports.front().averaging) << '\n';
}

}  // namespace assort
