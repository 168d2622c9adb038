#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "assort/cli.hpp"
#include "assort/config.hpp"
#include "assort/corpus.hpp"
#include "assort/embedding.hpp"
#include "assort/ensemble.hpp"
#include "assort/error.hpp"
#include "assort/evaluation.hpp"
#include "assort/featurizer.hpp"
#include "assort/gateway.hpp"
#include "assort/html.hpp"
#include "assort/indirect.hpp"
#include "assort/metrics.hpp"
#include "assort/question_classifier.hpp"
#include "assort/random.hpp"

namespace py = pybind11;
using namespace assort;

namespace {

TypeDistribution to_distribution(const std::vector<double>& p) {
  if (p.size() != kNumQuestionTypes) throw UsageError("expected one probability per question type");
  TypeDistribution d;
  std::copy(p.begin(), p.end(), d.probs.begin());
  return d;
}

GatewayConfig config_for(const std::string& url, double timeout, unsigned retries) {
  GatewayConfig c;
  c.base_url = url;
  c.timeout_seconds = timeout;
  c.max_retries = retries;
  c.backoff_seconds = 0.01;
  return c;
}

template <typename F>
auto without_gil(F&& f) {
  py::gil_scoped_release release;
  return f();
}

std::optional<std::string> type_name(const std::optional<QuestionType>& t) {
  if (!t) return std::nullopt;
  return std::string(to_string(*t));
}

}  // namespace

PYBIND11_MODULE(_assort, m) {
  m.doc() = "Extractive summaries of Stack Overflow answer posts";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ProviderError>(m, "ProviderError", base.ptr());
  py::register_exception<UsageError>(m, "UsageError", base.ptr());

  py::class_<Sentence>(m, "Sentence")
      .def_readonly("index", &Sentence::index)
      .def_readonly("text", &Sentence::text)
      .def_readonly("is_bold", &Sentence::is_bold)
      .def_readonly("has_inline_code", &Sentence::has_inline_code)
      .def_readonly("is_list_item_first", &Sentence::is_list_item_first)
      .def_readonly("precedes_code_block", &Sentence::precedes_code_block)
      .def_readonly("follows_code_block", &Sentence::follows_code_block)
      .def_readonly("total_in_post", &Sentence::total_in_post)
      .def("__repr__", [](const Sentence& s) { return "<Sentence " + std::to_string(s.index) + " " + s.text + ">"; });

  py::class_<QuestionRecord>(m, "Question")
      .def_readonly("id", &QuestionRecord::id)
      .def_readonly("title", &QuestionRecord::title)
      .def_readonly("tags", &QuestionRecord::tags)
      .def_property_readonly("gold_type", [](const QuestionRecord& q) { return type_name(q.gold_type); });

  py::class_<AnswerPost>(m, "Post")
      .def_readonly("id", &AnswerPost::id)
      .def_readonly("question_id", &AnswerPost::question_id)
      .def_readonly("sentences", &AnswerPost::sentences)
      .def_readonly("gold_summary", &AnswerPost::gold_summary)
      .def_readonly("html", &AnswerPost::html);

  py::class_<LabeledCorpus>(m, "Corpus")
      .def_readonly("questions", &LabeledCorpus::questions)
      .def_readonly("posts", &LabeledCorpus::posts)
      .def("question_of", &LabeledCorpus::question_of, py::return_value_policy::reference_internal)
      .def(
          "post",
          [](const LabeledCorpus& c, const std::string& id) {
            const AnswerPost* p = c.find_post(id);
            if (p == nullptr) throw DataError("no post " + id);
            return *p;
          },
          py::arg("id"));

  py::class_<DataSplit>(m, "Split")
      .def_readonly("train", &DataSplit::train)
      .def_readonly("dev", &DataSplit::dev)
      .def_readonly("test", &DataSplit::test)
      .def_readonly("seed", &DataSplit::seed);

  py::class_<Summary>(m, "Summary")
      .def_readonly("post_id", &Summary::post_id)
      .def_readonly("selected", &Summary::selected)
      .def_readonly("scores", &Summary::scores);

  py::class_<Counts>(m, "Counts")
      .def_readonly("gold", &Counts::gold)
      .def_readonly("predicted", &Counts::predicted)
      .def_readonly("overlap", &Counts::overlap);

  py::class_<Metrics>(m, "Metrics")
      .def_readonly("precision", &Metrics::precision)
      .def_readonly("recall", &Metrics::recall)
      .def_readonly("f1", &Metrics::f1)
      .def_readonly("counts", &Metrics::counts);

  py::class_<AppConfig>(m, "Config")
      .def(py::init<>())
      .def("set", [](AppConfig& c, const std::string& key, const std::string& value) { set_config_value(c, key, value); })
      .def("canonical_text", [](const AppConfig& c) { return canonical_text(c); })
      .def("digest", [](const AppConfig& c) { return config_digest(c); })
      .def_readonly("seed", &AppConfig::seed)
      .def_readonly("folds", &AppConfig::folds);
  m.def("load_config", &load_config, py::arg("path"));
  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("config_keys", &config_keys);

  py::class_<TrainedBundle>(m, "Bundle")
      .def_readonly("theta", &TrainedBundle::theta)
      .def_readonly("embedding_fingerprint", &TrainedBundle::embedding_fingerprint)
      .def_readonly("embedding_dim", &TrainedBundle::embedding_dim)
      .def_property_readonly("variant", [](const TrainedBundle& b) { return std::string(to_string(b.variant)); })
      .def("save", &TrainedBundle::save, py::arg("path"))
      .def_static(
          "load", [](const std::filesystem::path& p) { return TrainedBundle::load(p); }, py::arg("path"))
      .def("to_text", [](const TrainedBundle& b) {
        std::ostringstream out;
        b.write(out);
        return out.str();
      });

  m.def("load_corpus", &load_corpus, py::arg("path"));
  m.def("split_corpus", [](const LabeledCorpus& c, std::uint64_t seed) { return split_corpus(c, SplitRatios{}, seed); },
        py::arg("corpus"), py::arg("seed"));
  m.def("kfold", &kfold, py::arg("corpus"), py::arg("k"), py::arg("seed"));
  m.def("parse_post_html", &parse_post_html, py::arg("html"));

  m.def(
      "score_sentence",
      [](const std::vector<double>& p, const std::vector<double>& lambdas) {
        return score_sentence(to_distribution(p), lambdas);
      },
      py::arg("p"), py::arg("lambdas"));
  m.def("theta_grid", &theta_grid);
  m.def("select_above", [](const std::vector<double>& s, double theta) { return select_above(s, theta); },
        py::arg("scores"), py::arg("theta"));

  m.def(
      "metrics",
      [](const std::vector<std::size_t>& g, const std::vector<std::size_t>& p) { return metrics(g, p); },
      py::arg("gold"), py::arg("predicted"));
  m.def(
      "aggregate",
      [](const std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>& items, const std::string& averaging) {
        std::vector<Counts> counts;
        for (const auto& [g, p, o] : items) counts.push_back(Counts{g, p, o});
        return aggregate(counts, parse_averaging(averaging));
      },
      py::arg("counts"), py::arg("averaging") = "micro");

  m.def(
      "domain_features",
      [](const LabeledCorpus& c, const AnswerPost& post) {
        const Featurizer f;
        std::vector<std::vector<double>> rows;
        for (const Sentence& s : post.sentences) {
          const DomainFeatures d = f.build(c.question_of(post), s);
          rows.emplace_back(d.values.begin(), d.values.end());
        }
        return rows;
      },
      py::arg("corpus"), py::arg("post"));

  m.def("stub_embedding", &StubEmbedder::vector_for, py::arg("text"), py::arg("seed") = 0,
        py::arg("dim") = kDefaultEmbeddingDim);
  m.def("fnv1a64", &fnv1a64, py::arg("data"));
  m.def("splitmix64", &splitmix64, py::arg("x"));
  m.def("cache_digest", &EmbeddingCache::digest, py::arg("text"));
  m.def(
      "cached_remote_embed",
      [](const std::string& url, const std::vector<std::string>& texts, std::size_t dim,
         const std::filesystem::path& cache) {
        return without_gil([&] {
          auto client = std::make_shared<GatewayClient>(config_for(url, 5.0, 1));
          const RemoteEmbedder embedder(client, dim, cache);
          return embedder.embed(texts);
        });
      },
      py::arg("url"), py::arg("texts"), py::arg("dim"), py::arg("cache"));

  m.def(
      "remote_embed",
      [](const std::string& url, const std::vector<std::string>& texts) {
        const EmbedResult r = without_gil([&] { return GatewayClient(config_for(url, 5.0, 1)).remote_embed(texts); });
        return py::make_tuple(r.vectors, r.dim, r.model);
      },
      py::arg("url"), py::arg("texts"));
  m.def(
      "remote_nli",
      [](const std::string& url, const std::string& premise, const std::vector<std::string>& hypotheses) {
        const NliResult r = without_gil([&] { return GatewayClient(config_for(url, 5.0, 1)).remote_nli(premise, hypotheses); });
        std::vector<std::array<double, 3>> rows;
        for (const NliDistribution& d : r.probs) rows.push_back({d.entail, d.contradict, d.neutral});
        return py::make_tuple(rows, r.model);
      },
      py::arg("url"), py::arg("premise"), py::arg("hypotheses"));
  m.def(
      "remote_summarize",
      [](const std::string& url, const std::string& text, std::size_t max_tokens) {
        const SummarizeResult r = without_gil([&] { return GatewayClient(config_for(url, 5.0, 1)).remote_summarize(text, max_tokens); });
        return py::make_tuple(r.summary, r.model);
      },
      py::arg("url"), py::arg("text"), py::arg("max_tokens") = 142);
  m.def("healthy", [](const std::string& url) {
          return without_gil([&] { return GatewayClient(config_for(url, 2.0, 0)).healthy(); });
        }, py::arg("url"));

  m.def(
      "stub_nli",
      [](const std::string& premise, const std::vector<std::string>& hypotheses) {
        std::vector<std::array<double, 3>> rows;
        for (const NliDistribution& d : StubNli().infer(premise, hypotheses))
          rows.push_back({d.entail, d.contradict, d.neutral});
        return rows;
      },
      py::arg("premise"), py::arg("hypotheses"));
  m.def("stub_summarize", [](const std::string& text) { return StubSummarizer().summarize(text, 142); },
        py::arg("text"));

  m.def("lead_k", [](const AnswerPost& post, std::size_t k) { return lead_k_baseline(post, k).selected; },
        py::arg("post"), py::arg("k") = 3);
  m.def(
      "summarize_indirect_stub",
      [](const AnswerPost& post) { return summarize_indirect(post, StubSummarizer(), StubNli()); }, py::arg("post"));

  m.def(
      "train_stub",
      [](const LabeledCorpus& corpus, const AppConfig& config) {
        return without_gil([&] {
          const Providers p = make_providers(config, true, false);
          const Featurizer featurizer = make_featurizer(config);
          const DataSplit split = split_corpus(corpus, config.split, config.seed);
          return train_bundle(corpus, split, config.ensemble, featurizer, *p.embedder);
        });
      },
      py::arg("corpus"), py::arg("config"));
  m.def(
      "summarize_stub",
      [](const TrainedBundle& bundle, const LabeledCorpus& corpus, const AnswerPost& post, const AppConfig& config) {
        const Providers p = make_providers(config, true, false);
        const Featurizer featurizer = make_featurizer(config);
        return summarize_supervised(bundle, corpus.question_of(post), post, featurizer, *p.embedder);
      },
      py::arg("bundle"), py::arg("corpus"), py::arg("post"), py::arg("config"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
