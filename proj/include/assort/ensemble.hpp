#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "assort/featurizer.hpp"
#include "assort/fnn.hpp"
#include "assort/providers.hpp"
#include "assort/question_classifier.hpp"
#include "assort/types.hpp"

namespace assort {

enum class AblationVariant { kFull, kNoBert, kNoDomainFeatures, kNoEnsemble, kNoQuestionClassifier };

inline constexpr std::array<AblationVariant, 5> kAllVariants = {
    AblationVariant::kFull, AblationVariant::kNoBert, AblationVariant::kNoDomainFeatures,
    AblationVariant::kNoEnsemble, AblationVariant::kNoQuestionClassifier};

// "full", "no-bert", "no-domain-features", "no-ensemble", "no-question-classifier"
std::string_view to_string(AblationVariant v);
AblationVariant parse_variant(std::string_view s);

// phi = sum_i p_i * lambda_i. Throws UsageError unless lambdas has one
// entry per question type.
double score_sentence(const TypeDistribution& p, std::span<const double> lambdas);

// Sentence encoding [embedding (D) | domain features (28)]. NoBert zeroes
// the first block, NoDomainFeatures the second; the length is always D + 28.
std::vector<double> encode_sentence(const EmbeddingVector& embedding, const DomainFeatures& features,
                                    AblationVariant variant);

// One row per sentence. Skips the embedding call when the variant zeroes it.
Eigen::MatrixXd encode_post(const QuestionRecord& question, const AnswerPost& post, const Featurizer& featurizer,
                            const EmbeddingProvider& embedder, AblationVariant variant);

struct EnsembleConfig {
  SvmConfig svm;
  TrainConfig fnn;
  double theta = 0.5;
  bool tune_theta = false;
  AblationVariant variant = AblationVariant::kFull;
  // Select the first sentence when nothing clears theta. Off by default.
  bool lead1_fallback = false;
  std::uint64_t seed = 0;
};

struct TrainedBundle {
  LinearSvmModel svm;
  std::array<FnnModel, kNumQuestionTypes> heads;
  double theta = 0.5;
  std::string embedding_fingerprint;
  std::size_t embedding_dim = 0;
  AblationVariant variant = AblationVariant::kFull;
  bool lead1_fallback = false;

  // Text artifact:
  //   assort-bundle 1
  //   theta <t>
  //   variant <name>
  //   fallback <0|1>
  //   embedding <D> <fingerprint>
  //   <svm block> then "head <type>" + <fnn block> for each type
  //   end bundle
  void write(std::ostream& out) const;
  // Throws DataError when `expected_fingerprint` is given and differs.
  static TrainedBundle read(std::istream& in, const std::optional<std::string>& expected_fingerprint = std::nullopt);

  void save(const std::filesystem::path& path) const;
  static TrainedBundle load(const std::filesystem::path& path,
                            const std::optional<std::string>& expected_fingerprint = std::nullopt);
};

// Classifies the question, scores every sentence with all three heads and
// selects those with phi > theta. NoEnsemble replaces p by the one-hot of
// its argmax. Safe for concurrent calls.
Summary summarize_supervised(const TrainedBundle& bundle, const QuestionClassifier& classifier,
                             const QuestionRecord& question, const AnswerPost& post, const Featurizer& featurizer,
                             const EmbeddingProvider& embedder);
Summary summarize_supervised(const TrainedBundle& bundle, const QuestionRecord& question, const AnswerPost& post,
                             const Featurizer& featurizer, const EmbeddingProvider& embedder);

// Indices with score > theta, ascending.
std::vector<std::size_t> select_above(std::span<const double> scores, double theta);

// Theta candidates 0.30, 0.35, ..., 0.70.
std::vector<double> theta_grid();

// Best pooled F1 over the grid; ties go to the value nearest 0.5, then the
// smaller one. `scores[i]` and `gold[i]` describe post i.
double tune_theta(std::span<const std::vector<double>> scores, std::span<const std::vector<std::size_t>> gold);

struct BundleTrainResult {
  TrainedBundle bundle;
  // Post ids each head was trained on.
  std::array<std::vector<std::string>, kNumQuestionTypes> head_posts;
  std::array<std::vector<double>, kNumQuestionTypes> head_loss;
};

// SVM on the training questions, one head per gold type on the matching
// posts (one pooled head copied to all slots for NoQuestionClassifier),
// theta from the config or tuned on split.dev. Throws DataError when a
// type is missing from the training posts or a post lacks gold labels.
BundleTrainResult train_bundle_with_audit(const LabeledCorpus& corpus, const DataSplit& split,
                                          const EnsembleConfig& config, const Featurizer& featurizer,
                                          const EmbeddingProvider& embedder);
TrainedBundle train_bundle(const LabeledCorpus& corpus, const DataSplit& split, const EnsembleConfig& config,
                           const Featurizer& featurizer, const EmbeddingProvider& embedder);

}  // namespace assort
