#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "assort/ensemble.hpp"
#include "assort/indirect.hpp"
#include "assort/metrics.hpp"
#include "assort/types.hpp"

namespace assort {

using Predictor = std::function<Summary(const QuestionRecord&, const AnswerPost&)>;
// Builds the predictor for one fold, usually by training on split.train.
using PredictorFactory = std::function<Predictor(const DataSplit& split, std::size_t fold)>;

struct PostOutcome {
  std::string post_id;
  std::vector<std::size_t> selected;
  Counts counts;
};

struct FoldResult {
  std::size_t fold = 0;
  Metrics metrics;
  std::vector<PostOutcome> posts;
};

inline constexpr std::string_view kReportSchema = "assort-eval/1";

struct EvalReport {
  std::string run_id;
  std::string system;  // "assort_s", "assort_is", "lead3", ...
  std::string variant;
  double fraction = 1.0;
  std::uint64_t seed = 0;
  std::string config_digest;
  Averaging averaging = Averaging::kMicro;
  std::vector<FoldResult> folds;
  Metrics aggregate;
};

struct EvalOptions {
  Averaging averaging = Averaging::kMicro;
  // Folds evaluated at once.
  std::size_t parallelism = 1;
  // Copied into every report.
  std::string run_id;
  std::string config_digest;
  std::uint64_t seed = 0;
};

// Runs the factory's predictor over each split's test posts. Fold metrics
// and the aggregate are computed from per-post counts (pooled for micro).
EvalReport evaluate(const LabeledCorpus& corpus, std::span<const DataSplit> splits, const PredictorFactory& factory,
                    const EvalOptions& options, std::string system, std::string variant = {}, double fraction = 1.0);

// First min(k, N) sentences.
Summary lead_k_baseline(const AnswerPost& post, std::size_t k);
PredictorFactory lead_k_factory(std::size_t k);

PredictorFactory indirect_factory(const SummarizerProvider& summarizer, const NliProvider& nli,
                                  std::size_t max_tokens = kDefaultSummaryTokens);

struct SupervisedContext {
  const Featurizer* featurizer = nullptr;
  const EmbeddingProvider* embedder = nullptr;
  // Replaces the trained SVM at prediction time when set.
  std::shared_ptr<const QuestionClassifier> classifier;
};

// Trains a bundle per fold with `config` (variant included).
PredictorFactory supervised_factory(const LabeledCorpus& corpus, const EnsembleConfig& config,
                                    const SupervisedContext& context);

EvalReport run_ablation(AblationVariant variant, const LabeledCorpus& corpus, std::span<const DataSplit> splits,
                        const EnsembleConfig& config, const SupervisedContext& context, const EvalOptions& options);

// Training posts of `split` cut down to `fraction` with corpus::subsample;
// dev and test are unchanged.
DataSplit subsample_split(const LabeledCorpus& corpus, const DataSplit& split, double fraction, std::uint64_t seed);

// One ASSORT_S report per fraction (tagged with it), then, when `indirect`
// is given, a single indirect-pipeline report that does not depend on the
// fraction.
std::vector<EvalReport> low_resource_curve(const LabeledCorpus& corpus, std::span<const DataSplit> splits,
                                           std::span<const double> fractions, const EnsembleConfig& config,
                                           const SupervisedContext& context, const EvalOptions& options,
                                           const PredictorFactory* indirect = nullptr);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

// One JSON record per line.
void write_reports_jsonl(std::ostream& out, std::span<const EvalReport> reports);
// Fixed-width table of aggregate results, one row per report.
void write_reports_table(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace assort
