#include "assort/question_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "assort/error.hpp"
#include "assort/random.hpp"
#include "assort/serialize.hpp"
#include "assort/text.hpp"

namespace assort {

QuestionType TypeDistribution::argmax() const {
  const auto it = std::max_element(probs.begin(), probs.end());
  return kAllQuestionTypes[static_cast<std::size_t>(it - probs.begin())];
}

TypeDistribution TypeDistribution::one_hot(QuestionType t) {
  TypeDistribution d;
  d.probs[type_index(t)] = 1.0;
  return d;
}

TypeDistribution TypeDistribution::uniform() {
  TypeDistribution d;
  d.probs.fill(1.0 / kNumQuestionTypes);
  return d;
}

TitleVocabulary TitleVocabulary::build(std::span<const std::string> titles) {
  std::map<std::string, std::size_t> df;
  for (const std::string& title : titles) {
    auto tokens = word_tokens(title);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const std::string& t : unique) ++df[t];
  }
  TitleVocabulary vocab;
  vocab.documents_ = titles.size();
  for (const auto& [token, count] : df) {
    vocab.index_.emplace(token, vocab.tokens_.size());
    vocab.tokens_.push_back(token);
    vocab.df_.push_back(count);
  }
  return vocab;
}

std::size_t TitleVocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? tokens_.size() : it->second;
}

SparseVector TitleVocabulary::featurize(std::string_view title) const {
  std::map<std::size_t, double> counts;
  for (const std::string& token : word_tokens(title)) {
    const std::size_t idx = find(token);
    if (idx < tokens_.size()) counts[idx] += 1.0;
  }
  SparseVector out;
  out.reserve(counts.size());
  for (const auto& [idx, tf] : counts) {
    const double idf = std::log(static_cast<double>(documents_) / static_cast<double>(df_[idx]));
    out.emplace_back(idx, tf * idf);
  }
  return out;
}

void TitleVocabulary::write(std::ostream& out) const {
  out << "vocab " << tokens_.size() << ' ' << documents_ << '\n';
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << ' ' << df_[i] << '\n';
}

TitleVocabulary TitleVocabulary::read(std::istream& in) {
  io::LineReader reader(in, "vocabulary");
  auto head = reader.expect("vocab", 3);
  TitleVocabulary vocab;
  const std::size_t n = std::stoul(head[1]);
  vocab.documents_ = std::stoul(head[2]);
  for (std::size_t i = 0; i < n; ++i) {
    auto f = reader.fields();
    if (f.size() != 2) reader.fail("expected '<token> <df>'");
    vocab.index_.emplace(f[0], i);
    vocab.tokens_.push_back(f[0]);
    vocab.df_.push_back(std::stoul(f[1]));
  }
  return vocab;
}

std::array<double, kNumQuestionTypes> LinearSvmModel::margins(const SparseVector& features) const {
  std::array<double, kNumQuestionTypes> out = biases;
  for (std::size_t c = 0; c < kNumQuestionTypes; ++c)
    for (const auto& [idx, value] : features) out[c] += weights[c][idx] * value;
  return out;
}

std::array<double, kNumQuestionTypes> LinearSvmModel::margins(std::string_view title) const {
  return margins(vocabulary.featurize(title));
}

void LinearSvmModel::write(std::ostream& out) const {
  out << "svm 1\n";
  out << "temperature " << io::format_double(temperature) << '\n';
  vocabulary.write(out);
  for (std::size_t c = 0; c < kNumQuestionTypes; ++c) {
    out << "class " << to_string(kAllQuestionTypes[c]) << ' ' << io::format_double(biases[c]);
    for (double w : weights[c]) out << ' ' << io::format_double(w);
    out << '\n';
  }
  out << "end svm\n";
}

LinearSvmModel LinearSvmModel::read(std::istream& in) {
  io::LineReader reader(in, "svm artifact");
  auto head = reader.expect("svm", 2);
  if (head[1] != "1") reader.fail("unsupported svm artifact version " + head[1]);
  LinearSvmModel model;
  auto temp = reader.expect("temperature", 2);
  model.temperature = reader.doubles(temp, 1, 1)[0];
  if (!(model.temperature > 0)) reader.fail("temperature must be positive");
  model.vocabulary = TitleVocabulary::read(in);
  const std::size_t v = model.vocabulary.size();
  for (std::size_t c = 0; c < kNumQuestionTypes; ++c) {
    auto f = reader.expect("class", 3);
    if (f[1] != to_string(kAllQuestionTypes[c])) reader.fail("class order mismatch at " + f[1]);
    auto values = reader.doubles(f, 2, v + 1);
    model.biases[c] = values[0];
    model.weights[c].assign(values.begin() + 1, values.end());
  }
  reader.expect("end");
  return model;
}

TypeDistribution softmax(const std::array<double, kNumQuestionTypes>& margins, double temperature) {
  TypeDistribution d;
  const double top = *std::max_element(margins.begin(), margins.end());
  double total = 0.0;
  for (std::size_t c = 0; c < kNumQuestionTypes; ++c) {
    d.probs[c] = std::exp((margins[c] - top) / temperature);
    total += d.probs[c];
  }
  for (double& p : d.probs) p /= total;
  return d;
}

TypeDistribution predict_distribution(const LinearSvmModel& model, std::string_view title) {
  return softmax(model.margins(title), model.temperature);
}

SvmTrainResult train_svm_with_history(std::span<const LabeledTitle> examples, const SvmConfig& config) {
  std::array<std::size_t, kNumQuestionTypes> per_class{};
  for (const LabeledTitle& e : examples) ++per_class[type_index(e.type)];
  for (std::size_t c = 0; c < kNumQuestionTypes; ++c) {
    if (per_class[c] == 0)
      throw DataError("svm training needs at least one example of type " + std::string(to_string(kAllQuestionTypes[c])) +
                      ", found " + std::to_string(per_class[c]));
  }
  if (!(config.temperature > 0)) throw UsageError("svm temperature must be positive");

  std::vector<std::string> titles;
  titles.reserve(examples.size());
  for (const LabeledTitle& e : examples) titles.push_back(e.title);

  SvmTrainResult result;
  LinearSvmModel& model = result.model;
  model.vocabulary = TitleVocabulary::build(titles);
  model.temperature = config.temperature;
  const std::size_t v = model.vocabulary.size();
  for (auto& w : model.weights) w.assign(v, 0.0);

  std::vector<SparseVector> features;
  features.reserve(examples.size());
  for (const LabeledTitle& e : examples) features.push_back(model.vocabulary.featurize(e.title));

  auto objective = [&]() {
    double total = 0.0;
    for (std::size_t c = 0; c < kNumQuestionTypes; ++c) {
      double norm = 0.0;
      for (double w : model.weights[c]) norm += w * w;
      double hinge = 0.0;
      for (std::size_t i = 0; i < examples.size(); ++i) {
        const double y = type_index(examples[i].type) == c ? 1.0 : -1.0;
        double m = model.biases[c];
        for (const auto& [idx, x] : features[i]) m += model.weights[c][idx] * x;
        hinge += std::max(0.0, 1.0 - y * m);
      }
      total += 0.5 * config.lambda * norm + hinge / static_cast<double>(examples.size());
    }
    return total;
  };

  // Pegasos-style stochastic subgradient steps; the bias is not regularized.
  Rng rng(config.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      ++t;
      const double eta = config.learning_rate / std::sqrt(static_cast<double>(t));
      const double shrink = 1.0 - eta * config.lambda;
      for (std::size_t c = 0; c < kNumQuestionTypes; ++c) {
        const double y = type_index(examples[i].type) == c ? 1.0 : -1.0;
        double m = model.biases[c];
        for (const auto& [idx, x] : features[i]) m += model.weights[c][idx] * x;
        for (double& w : model.weights[c]) w *= shrink;
        if (y * m < 1.0) {
          for (const auto& [idx, x] : features[i]) model.weights[c][idx] += eta * y * x;
          model.biases[c] += eta * y;
        }
      }
    }
    result.epoch_loss.push_back(objective());
  }
  return result;
}

LinearSvmModel train_svm(std::span<const LabeledTitle> examples, const SvmConfig& config) {
  return train_svm_with_history(examples, config).model;
}

LinearSvmModel train_svm(std::span<const QuestionRecord> questions, const SvmConfig& config) {
  std::vector<LabeledTitle> examples;
  for (const QuestionRecord& q : questions) {
    if (!q.gold_type) throw DataError("question " + q.id + " has no gold type");
    examples.push_back({q.title, *q.gold_type});
  }
  return train_svm(std::span<const LabeledTitle>(examples), config);
}

}  // namespace assort
