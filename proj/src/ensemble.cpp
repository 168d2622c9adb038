#include "assort/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>

#include "assort/error.hpp"
#include "assort/metrics.hpp"
#include "assort/random.hpp"
#include "assort/serialize.hpp"

namespace assort {

namespace {

constexpr std::array<std::string_view, 5> kVariantNames = {"full", "no-bert", "no-domain-features", "no-ensemble",
                                                           "no-question-classifier"};

std::uint64_t head_seed(std::uint64_t seed, std::size_t slot) { return splitmix64(seed ^ (0x100 + slot)); }

}  // namespace

std::string_view to_string(AblationVariant v) { return kVariantNames[static_cast<std::size_t>(v)]; }

AblationVariant parse_variant(std::string_view s) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i)
    if (kVariantNames[i] == s) return kAllVariants[i];
  throw UsageError("unknown ablation variant '" + std::string(s) + "'");
}

double score_sentence(const TypeDistribution& p, std::span<const double> lambdas) {
  if (lambdas.size() != kNumQuestionTypes)
    throw UsageError("expected " + std::to_string(kNumQuestionTypes) + " head scores, got " +
                     std::to_string(lambdas.size()));
  // Summing the products in sorted order makes the result independent of
  // how the (p, lambda) pairs are listed.
  std::array<double, kNumQuestionTypes> terms;
  for (std::size_t i = 0; i < kNumQuestionTypes; ++i) terms[i] = p.probs[i] * lambdas[i];
  std::sort(terms.begin(), terms.end());
  double phi = 0.0;
  for (double t : terms) phi += t;
  return phi;
}

std::vector<double> encode_sentence(const EmbeddingVector& embedding, const DomainFeatures& features,
                                    AblationVariant variant) {
  std::vector<double> out(embedding.size() + kNumDomainFeatures, 0.0);
  if (variant != AblationVariant::kNoBert) std::copy(embedding.begin(), embedding.end(), out.begin());
  if (variant != AblationVariant::kNoDomainFeatures)
    std::copy(features.values.begin(), features.values.end(), out.begin() + static_cast<std::ptrdiff_t>(embedding.size()));
  return out;
}

Eigen::MatrixXd encode_post(const QuestionRecord& question, const AnswerPost& post, const Featurizer& featurizer,
                            const EmbeddingProvider& embedder, AblationVariant variant) {
  const std::size_t d = embedder.dimension();
  const auto n = static_cast<Eigen::Index>(post.sentences.size());
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d + kNumDomainFeatures));
  if (n == 0) return x;
  if (variant != AblationVariant::kNoBert) {
    std::vector<std::string> texts;
    texts.reserve(post.sentences.size());
    for (const Sentence& s : post.sentences) texts.push_back(s.text);
    const auto vectors = embedder.embed(texts);
    if (vectors.size() != texts.size()) throw ProviderError("embedding provider returned the wrong number of vectors");
    for (Eigen::Index r = 0; r < n; ++r) {
      const EmbeddingVector& v = vectors[static_cast<std::size_t>(r)];
      if (v.size() != d) throw ProviderError("embedding provider returned a vector of the wrong length");
      for (std::size_t c = 0; c < d; ++c) x(r, static_cast<Eigen::Index>(c)) = v[c];
    }
  }
  if (variant != AblationVariant::kNoDomainFeatures) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const DomainFeatures f = featurizer.build(question, post.sentences[static_cast<std::size_t>(r)]);
      for (std::size_t c = 0; c < kNumDomainFeatures; ++c) x(r, static_cast<Eigen::Index>(d + c)) = f.values[c];
    }
  }
  return x;
}

// ---------------------------------------------------------------------------

void TrainedBundle::write(std::ostream& out) const {
  out << "assort-bundle 1\n";
  out << "theta " << io::format_double(theta) << '\n';
  out << "variant " << to_string(variant) << '\n';
  out << "fallback " << (lead1_fallback ? 1 : 0) << '\n';
  out << "embedding " << embedding_dim << ' ' << embedding_fingerprint << '\n';
  svm.write(out);
  for (QuestionType t : kAllQuestionTypes) {
    out << "head " << to_string(t) << '\n';
    heads[type_index(t)].write(out, embedding_dim);
  }
  out << "end bundle\n";
}

TrainedBundle TrainedBundle::read(std::istream& in, const std::optional<std::string>& expected_fingerprint) {
  io::LineReader reader(in, "bundle");
  auto head = reader.expect("assort-bundle", 2);
  if (head[1] != "1") reader.fail("unsupported bundle version " + head[1]);
  TrainedBundle b;
  b.theta = reader.doubles(reader.expect("theta", 2), 1, 1)[0];
  if (!(b.theta > 0.0 && b.theta < 1.0)) reader.fail("theta must lie in (0, 1)");
  b.variant = parse_variant(reader.expect("variant", 2)[1]);
  b.lead1_fallback = reader.expect("fallback", 2)[1] == "1";
  auto emb = reader.expect("embedding", 3);
  b.embedding_dim = std::stoul(emb[1]);
  for (std::size_t i = 2; i < emb.size(); ++i) b.embedding_fingerprint += (i > 2 ? " " : "") + emb[i];
  if (expected_fingerprint && *expected_fingerprint != b.embedding_fingerprint)
    throw DataError("bundle was trained with embeddings '" + b.embedding_fingerprint +
                    "' but the configured provider is '" + *expected_fingerprint + "'");
  b.svm = LinearSvmModel::read(in);
  for (QuestionType t : kAllQuestionTypes) {
    auto f = reader.expect("head", 2);
    if (f[1] != to_string(t)) reader.fail("expected head " + std::string(to_string(t)) + ", found " + f[1]);
    FnnModel m = FnnModel::read(in, b.embedding_dim);
    if (m.input_dim() != b.embedding_dim + kNumDomainFeatures) reader.fail("head input size does not match D + 28");
    b.heads[type_index(t)] = std::move(m);
  }
  reader.expect("end");
  return b;
}

void TrainedBundle::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write bundle " + path.string());
  write(out);
  if (!out) throw DataError("failed writing bundle " + path.string());
}

TrainedBundle TrainedBundle::load(const std::filesystem::path& path,
                                  const std::optional<std::string>& expected_fingerprint) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open bundle " + path.string());
  return read(in, expected_fingerprint);
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> select_above(std::span<const double> scores, double theta) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] > theta) out.push_back(i);
  return out;
}

Summary summarize_supervised(const TrainedBundle& bundle, const QuestionClassifier& classifier,
                             const QuestionRecord& question, const AnswerPost& post, const Featurizer& featurizer,
                             const EmbeddingProvider& embedder) {
  if (embedder.dimension() != bundle.embedding_dim)
    throw DataError("bundle expects " + std::to_string(bundle.embedding_dim) + "-dim embeddings, provider yields " +
                    std::to_string(embedder.dimension()));
  Summary summary;
  summary.post_id = post.id;
  if (post.sentences.empty()) return summary;

  TypeDistribution p = classifier.classify(question);
  if (bundle.variant == AblationVariant::kNoEnsemble) p = TypeDistribution::one_hot(p.argmax());

  const Eigen::MatrixXd x = encode_post(question, post, featurizer, embedder, bundle.variant);
  std::array<Eigen::VectorXd, kNumQuestionTypes> lambdas;
  for (std::size_t h = 0; h < kNumQuestionTypes; ++h) lambdas[h] = forward(bundle.heads[h], x);

  summary.scores.resize(post.sentences.size());
  for (std::size_t i = 0; i < post.sentences.size(); ++i) {
    std::array<double, kNumQuestionTypes> l;
    for (std::size_t h = 0; h < kNumQuestionTypes; ++h) l[h] = lambdas[h][static_cast<Eigen::Index>(i)];
    summary.scores[i] = score_sentence(p, l);
  }
  summary.selected = select_above(summary.scores, bundle.theta);
  if (summary.selected.empty() && bundle.lead1_fallback) summary.selected.push_back(0);
  return summary;
}

Summary summarize_supervised(const TrainedBundle& bundle, const QuestionRecord& question, const AnswerPost& post,
                             const Featurizer& featurizer, const EmbeddingProvider& embedder) {
  return summarize_supervised(bundle, SvmQuestionClassifier(bundle.svm), question, post, featurizer, embedder);
}

std::vector<double> theta_grid() {
  std::vector<double> grid;
  for (int i = 30; i <= 70; i += 5) grid.push_back(i / 100.0);
  return grid;
}

double tune_theta(std::span<const std::vector<double>> scores, std::span<const std::vector<std::size_t>> gold) {
  if (scores.size() != gold.size()) throw UsageError("theta tuning needs one gold list per scored post");
  double best_theta = 0.5;
  double best_f1 = -1.0;
  for (double theta : theta_grid()) {
    Counts pooled;
    for (std::size_t i = 0; i < scores.size(); ++i) pooled += count(gold[i], select_above(scores[i], theta));
    const double f1 = Metrics::from_counts(pooled).f1;
    const double dist = std::abs(theta - 0.5);
    const double best_dist = std::abs(best_theta - 0.5);
    if (f1 > best_f1 || (f1 == best_f1 && (dist < best_dist || (dist == best_dist && theta < best_theta)))) {
      best_f1 = f1;
      best_theta = theta;
    }
  }
  return best_theta;
}

// ---------------------------------------------------------------------------

BundleTrainResult train_bundle_with_audit(const LabeledCorpus& corpus, const DataSplit& split,
                                          const EnsembleConfig& config, const Featurizer& featurizer,
                                          const EmbeddingProvider& embedder) {
  if (!(config.theta > 0.0 && config.theta < 1.0)) throw UsageError("theta must lie in (0, 1)");
  BundleTrainResult result;
  TrainedBundle& bundle = result.bundle;
  bundle.variant = config.variant;
  bundle.theta = config.theta;
  bundle.lead1_fallback = config.lead1_fallback;
  bundle.embedding_dim = embedder.dimension();
  bundle.embedding_fingerprint = embedder.fingerprint();

  struct TrainPost {
    const AnswerPost* post;
    const QuestionRecord* question;
    QuestionType type;
  };
  std::vector<TrainPost> posts;
  for (const std::string& id : split.train) {
    const AnswerPost* post = corpus.find_post(id);
    if (post == nullptr) throw DataError("training split names unknown post " + id);
    const QuestionRecord& q = corpus.question_of(*post);
    if (!q.gold_type) throw DataError("question " + q.id + " of training post " + id + " has no type label");
    if (!post->gold_summary) throw DataError("training post " + id + " has no gold summary");
    posts.push_back({post, &q, *q.gold_type});
  }
  for (QuestionType t : kAllQuestionTypes) {
    if (std::none_of(posts.begin(), posts.end(), [&](const TrainPost& p) { return p.type == t; }))
      throw DataError("training split has no " + std::string(to_string(t)) + " posts");
  }

  std::set<std::string> seen_questions;
  std::vector<LabeledTitle> titles;
  for (const TrainPost& p : posts)
    if (seen_questions.insert(p.question->id).second) titles.push_back({p.question->title, p.type});
  SvmConfig svm_config = config.svm;
  svm_config.seed = splitmix64(config.seed ^ 0x5u);
  bundle.svm = train_svm(titles, svm_config);

  // Head datasets; slot 0 holds the pooled set for NoQuestionClassifier.
  const bool pooled = config.variant == AblationVariant::kNoQuestionClassifier;
  const std::size_t slots = pooled ? 1 : kNumQuestionTypes;
  std::vector<std::vector<Eigen::MatrixXd>> blocks(slots);
  std::vector<std::vector<double>> labels(slots);
  for (const TrainPost& p : posts) {
    const std::size_t slot = pooled ? 0 : type_index(p.type);
    blocks[slot].push_back(encode_post(*p.question, *p.post, featurizer, embedder, config.variant));
    const std::set<std::size_t> gold(p.post->gold_summary->begin(), p.post->gold_summary->end());
    for (std::size_t i = 0; i < p.post->sentences.size(); ++i) labels[slot].push_back(gold.count(i) ? 1.0 : 0.0);
    if (pooled) {
      for (auto& ids : result.head_posts) ids.push_back(p.post->id);
    } else {
      result.head_posts[slot].push_back(p.post->id);
    }
  }

  const std::size_t input = bundle.embedding_dim + kNumDomainFeatures;
  auto train_slot = [&](std::size_t slot) {
    Dataset data;
    data.features.resize(static_cast<Eigen::Index>(labels[slot].size()), static_cast<Eigen::Index>(input));
    Eigen::Index row = 0;
    for (const Eigen::MatrixXd& b : blocks[slot]) {
      data.features.middleRows(row, b.rows()) = b;
      row += b.rows();
    }
    data.labels = Eigen::Map<const Eigen::VectorXd>(labels[slot].data(), static_cast<Eigen::Index>(labels[slot].size()));
    TrainConfig fnn = config.fnn;
    fnn.seed = head_seed(config.seed, slot + 0x10);
    return train_with_history(init_fnn(head_seed(config.seed, slot), input, config.fnn.hidden), data, fnn);
  };

  std::vector<std::future<FnnTrainResult>> jobs;
  for (std::size_t slot = 0; slot < slots; ++slot) jobs.push_back(std::async(std::launch::async, train_slot, slot));
  for (std::size_t slot = 0; slot < slots; ++slot) {
    FnnTrainResult r = jobs[slot].get();
    if (pooled) {
      for (std::size_t h = 0; h < kNumQuestionTypes; ++h) {
        bundle.heads[h] = r.model;
        result.head_loss[h] = r.epoch_loss;
      }
    } else {
      bundle.heads[slot] = std::move(r.model);
      result.head_loss[slot] = std::move(r.epoch_loss);
    }
  }

  if (config.tune_theta && !split.dev.empty()) {
    std::vector<std::vector<double>> scores;
    std::vector<std::vector<std::size_t>> gold;
    for (const std::string& id : split.dev) {
      const AnswerPost* post = corpus.find_post(id);
      if (post == nullptr) throw DataError("dev split names unknown post " + id);
      if (!post->gold_summary) throw DataError("dev post " + id + " has no gold summary");
      scores.push_back(summarize_supervised(bundle, corpus.question_of(*post), *post, featurizer, embedder).scores);
      gold.push_back(*post->gold_summary);
    }
    bundle.theta = tune_theta(scores, gold);
  }
  return result;
}

TrainedBundle train_bundle(const LabeledCorpus& corpus, const DataSplit& split, const EnsembleConfig& config,
                           const Featurizer& featurizer, const EmbeddingProvider& embedder) {
  return train_bundle_with_audit(corpus, split, config, featurizer, embedder).bundle;
}

}  // namespace assort
