#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "assort/types.hpp"

namespace assort {

// Softmax confidence over the three question types, indexed by
// type_index().
struct TypeDistribution {
  std::array<double, kNumQuestionTypes> probs{};

  QuestionType argmax() const;
  static TypeDistribution one_hot(QuestionType t);
  static TypeDistribution uniform();
};

using SparseVector = std::vector<std::pair<std::size_t, double>>;

// Title vocabulary with document frequencies, indices dense 0..V-1 in
// lexicographic token order.
class TitleVocabulary {
 public:
  TitleVocabulary() = default;
  static TitleVocabulary build(std::span<const std::string> titles);

  std::size_t size() const { return tokens_.size(); }
  std::size_t documents() const { return documents_; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }

  // Index of `token`, or size() when out of vocabulary.
  std::size_t find(const std::string& token) const;

  // Raw term count times ln(N / df), over lowercase word tokens, sorted by
  // index. Out-of-vocabulary tokens are dropped.
  SparseVector featurize(std::string_view title) const;

  void write(std::ostream& out) const;
  static TitleVocabulary read(std::istream& in);

 private:
  std::vector<std::string> tokens_;
  std::vector<std::size_t> df_;
  std::map<std::string, std::size_t> index_;
  std::size_t documents_ = 0;
};

struct SvmConfig {
  double lambda = 1e-4;
  std::size_t epochs = 200;
  double learning_rate = 0.1;  // step size is learning_rate / sqrt(t)
  double temperature = 1.0;
  std::uint64_t seed = 0;
};

// One-vs-rest linear SVM over TF-IDF title features.
struct LinearSvmModel {
  TitleVocabulary vocabulary;
  std::array<std::vector<double>, kNumQuestionTypes> weights;
  std::array<double, kNumQuestionTypes> biases{};
  double temperature = 1.0;

  std::array<double, kNumQuestionTypes> margins(const SparseVector& features) const;
  std::array<double, kNumQuestionTypes> margins(std::string_view title) const;

  void write(std::ostream& out) const;
  static LinearSvmModel read(std::istream& in);
};

struct SvmTrainResult {
  LinearSvmModel model;
  // Regularized hinge objective after each epoch, summed over the
  // one-vs-rest problems.
  std::vector<double> epoch_loss;
};

struct LabeledTitle {
  std::string title;
  QuestionType type;
};

// Throws DataError unless every class has at least one example.
SvmTrainResult train_svm_with_history(std::span<const LabeledTitle> examples, const SvmConfig& config);
LinearSvmModel train_svm(std::span<const LabeledTitle> examples, const SvmConfig& config);
LinearSvmModel train_svm(std::span<const QuestionRecord> questions, const SvmConfig& config);

// Softmax over margins / temperature.
TypeDistribution softmax(const std::array<double, kNumQuestionTypes>& margins, double temperature = 1.0);

TypeDistribution predict_distribution(const LinearSvmModel& model, std::string_view title);

// Anything that yields a type distribution for a question. The ensemble
// consumes this so tests can force one-hot confidence.
class QuestionClassifier {
 public:
  virtual ~QuestionClassifier() = default;
  virtual TypeDistribution classify(const QuestionRecord& question) const = 0;
};

class SvmQuestionClassifier final : public QuestionClassifier {
 public:
  explicit SvmQuestionClassifier(const LinearSvmModel& model) : model_(model) {}
  TypeDistribution classify(const QuestionRecord& question) const override {
    return predict_distribution(model_, question.title);
  }

 private:
  const LinearSvmModel& model_;
};

}  // namespace assort
