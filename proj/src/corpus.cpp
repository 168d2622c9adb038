#include "assort/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "assort/error.hpp"
#include "assort/html.hpp"
#include "assort/random.hpp"

namespace assort {

using nlohmann::json;

std::string_view to_string(QuestionType t) {
  switch (t) {
    case QuestionType::kHowTo: return "howto";
    case QuestionType::kConceptual: return "conceptual";
    case QuestionType::kBugFixing: return "bugfix";
  }
  return "?";
}

std::optional<QuestionType> parse_question_type(std::string_view s) {
  if (s == "howto") return QuestionType::kHowTo;
  if (s == "conceptual") return QuestionType::kConceptual;
  if (s == "bugfix") return QuestionType::kBugFixing;
  return std::nullopt;
}

const QuestionRecord& LabeledCorpus::question_of(const AnswerPost& post) const {
  auto it = questions.find(post.question_id);
  if (it == questions.end()) throw DataError("post " + post.id + " references unknown question " + post.question_id);
  return it->second;
}

const AnswerPost* LabeledCorpus::find_post(std::string_view id) const {
  for (const AnswerPost& p : posts)
    if (p.id == id) return &p;
  return nullptr;
}

std::optional<QuestionType> post_type(const LabeledCorpus& corpus, const AnswerPost& post) {
  return corpus.question_of(post).gold_type;
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("corpus line " + std::to_string(line) + ": " + what);
}

std::string id_string(const json& value, std::size_t line, const char* field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  fail(line, std::string("field '") + field + "' must be a string or integer");
}

}  // namespace

LabeledCorpus parse_corpus(std::istream& in) {
  LabeledCorpus corpus;
  std::map<std::string, std::size_t> post_lines;
  std::set<std::string> post_ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      fail(line, std::string("malformed record: ") + e.what());
    }
    if (!record.is_object() || !record.contains("kind") || !record["kind"].is_string())
      fail(line, "record must be an object with a string 'kind'");
    const std::string kind = record["kind"].get<std::string>();
    try {
      if (kind == "q") {
        QuestionRecord q;
        if (!record.contains("id")) fail(line, "question without 'id'");
        q.id = id_string(record["id"], line, "id");
        q.title = record.value("title", std::string());
        if (q.title.empty()) fail(line, "question " + q.id + " has an empty title");
        if (record.contains("tags")) q.tags = record["tags"].get<std::vector<std::string>>();
        if (record.contains("type") && !record["type"].is_null()) {
          const std::string type = record["type"].get<std::string>();
          q.gold_type = parse_question_type(type);
          if (!q.gold_type) fail(line, "unknown question type '" + type + "'");
        }
        if (corpus.questions.count(q.id) != 0) fail(line, "duplicate question id " + q.id);
        corpus.questions.emplace(q.id, std::move(q));
      } else if (kind == "a") {
        AnswerPost post;
        if (!record.contains("id") || !record.contains("qid")) fail(line, "post needs 'id' and 'qid'");
        post.id = id_string(record["id"], line, "id");
        post.question_id = id_string(record["qid"], line, "qid");
        if (!post_ids.insert(post.id).second) fail(line, "duplicate post id " + post.id);
        post.html = record.value("html", std::string());
        post.sentences = parse_post_html(post.html);
        if (record.contains("gold") && !record["gold"].is_null()) {
          std::vector<long long> raw = record["gold"].get<std::vector<long long>>();
          std::set<std::size_t> gold;
          for (long long g : raw) {
            if (g < 0 || static_cast<std::size_t>(g) >= post.sentences.size())
              fail(line, "gold index " + std::to_string(g) + " out of range for post " + post.id + " with " +
                             std::to_string(post.sentences.size()) + " sentences");
            gold.insert(static_cast<std::size_t>(g));
          }
          post.gold_summary = std::vector<std::size_t>(gold.begin(), gold.end());
        }
        // Code-only posts carry nothing to select from.
        if (post.sentences.empty()) continue;
        post_lines[post.id] = line;
        corpus.posts.push_back(std::move(post));
      } else {
        fail(line, "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      fail(line, std::string("bad field: ") + e.what());
    }
  }
  for (const AnswerPost& post : corpus.posts) {
    if (corpus.questions.count(post.question_id) == 0)
      fail(post_lines[post.id], "post " + post.id + " references unknown question " + post.question_id);
  }
  return corpus;
}

LabeledCorpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const LabeledCorpus& corpus) {
  for (const auto& [id, q] : corpus.questions) {
    json rec = {{"kind", "q"}, {"id", q.id}, {"title", q.title}, {"tags", q.tags}};
    if (q.gold_type) rec["type"] = std::string(to_string(*q.gold_type));
    out << rec.dump() << '\n';
  }
  for (const AnswerPost& p : corpus.posts) {
    json rec = {{"kind", "a"}, {"id", p.id}, {"qid", p.question_id}, {"html", p.html}};
    if (p.gold_summary) rec["gold"] = *p.gold_summary;
    out << rec.dump() << '\n';
  }
}

namespace {

// Post ids grouped by question type; posts without a type go last.
std::vector<std::vector<std::string>> group_by_type(const LabeledCorpus& corpus) {
  std::vector<std::vector<std::string>> groups(kNumQuestionTypes + 1);
  for (const AnswerPost& post : corpus.posts) {
    const auto type = post_type(corpus, post);
    groups[type ? type_index(*type) : kNumQuestionTypes].push_back(post.id);
  }
  return groups;
}

}  // namespace

DataSplit split_corpus(const LabeledCorpus& corpus, SplitRatios ratios, std::uint64_t seed) {
  const unsigned total = ratios.train + ratios.dev + ratios.test;
  if (total == 0 || ratios.train == 0) throw UsageError("split ratios must include a training share");
  auto groups = group_by_type(corpus);
  if (!groups[kNumQuestionTypes].empty())
    throw DataError("split_corpus needs a question type for every post");
  DataSplit split;
  split.seed = seed;
  Rng rng(seed);
  for (std::size_t t = 0; t < kNumQuestionTypes; ++t) {
    auto& ids = groups[t];
    if (ids.size() < 10)
      throw DataError("question type " + std::string(to_string(kAllQuestionTypes[t])) + " has " +
                      std::to_string(ids.size()) + " posts; at least 10 are required");
    rng.shuffle(std::span<std::string>(ids));
    const std::size_t n_dev = ids.size() * ratios.dev / total;
    const std::size_t n_test = ids.size() * ratios.test / total;
    const std::size_t n_train = ids.size() - n_dev - n_test;
    split.train.insert(split.train.end(), ids.begin(), ids.begin() + n_train);
    split.dev.insert(split.dev.end(), ids.begin() + n_train, ids.begin() + n_train + n_dev);
    split.test.insert(split.test.end(), ids.begin() + n_train + n_dev, ids.end());
  }
  return split;
}

std::vector<DataSplit> kfold(const LabeledCorpus& corpus, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw UsageError("kfold needs k >= 2");
  if (k > corpus.posts.size())
    throw DataError("kfold: k=" + std::to_string(k) + " exceeds post count " + std::to_string(corpus.posts.size()));
  Rng rng(seed);
  std::vector<std::string> order;
  for (auto& ids : group_by_type(corpus)) {
    rng.shuffle(std::span<std::string>(ids));
    order.insert(order.end(), ids.begin(), ids.end());
  }
  std::vector<std::vector<std::string>> folds(k);
  for (std::size_t i = 0; i < order.size(); ++i) folds[i % k].push_back(order[i]);

  std::vector<DataSplit> splits(k);
  for (std::size_t i = 0; i < k; ++i) {
    DataSplit& s = splits[i];
    s.seed = seed;
    s.test = folds[i];
    const std::size_t dev_fold = k >= 3 ? (i + 1) % k : k;
    if (dev_fold < k) s.dev = folds[dev_fold];
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i || j == dev_fold) continue;
      s.train.insert(s.train.end(), folds[j].begin(), folds[j].end());
    }
  }
  return splits;
}

std::vector<std::string> subsample_order(const LabeledCorpus& corpus, std::uint64_t seed) {
  Rng rng(seed);
  auto groups = group_by_type(corpus);
  for (auto& ids : groups) rng.shuffle(std::span<std::string>(ids));
  std::vector<std::string> order;
  order.reserve(corpus.posts.size());
  for (std::size_t round = 0; order.size() < corpus.posts.size(); ++round) {
    for (const auto& ids : groups)
      if (round < ids.size()) order.push_back(ids[round]);
  }
  return order;
}

LabeledCorpus subsample(const LabeledCorpus& corpus, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) throw UsageError("subsample fraction must lie in (0, 1]");
  std::vector<std::string> order = subsample_order(corpus, seed);
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(order.size()) - 1e-9));
  order.resize(std::min(keep, order.size()));
  // Preserve the corpus' own post order among the retained ids.
  std::set<std::string> kept(order.begin(), order.end());
  std::vector<std::string> ids;
  for (const AnswerPost& p : corpus.posts)
    if (kept.count(p.id)) ids.push_back(p.id);
  return select_posts(corpus, ids);
}

LabeledCorpus select_posts(const LabeledCorpus& corpus, const std::vector<std::string>& ids) {
  std::map<std::string_view, const AnswerPost*> by_id;
  for (const AnswerPost& p : corpus.posts) by_id.emplace(p.id, &p);
  LabeledCorpus out;
  for (const std::string& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("unknown post id " + id);
    const AnswerPost& post = *it->second;
    out.posts.push_back(post);
    out.questions.emplace(post.question_id, corpus.question_of(post));
  }
  return out;
}

}  // namespace assort
