#include "assort/cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>

#include "assort/corpus.hpp"
#include "assort/embedding.hpp"
#include "assort/ensemble.hpp"
#include "assort/error.hpp"
#include "assort/evaluation.hpp"
#include "assort/indirect.hpp"
#include "assort/text.hpp"

namespace assort {

using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return sha256_hex(buffer.str());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

struct Options {
  std::string corpus;
  std::string config;
  std::string bundle;
  std::string post;
  std::string post_id;
  std::string out;
  std::string manifest;
  std::string format = "json";
  std::string fractions;
  std::string variant;
  std::vector<std::string> set;
  std::uint64_t seed = 0;
  std::size_t folds = 0;
  bool seed_given = false;
  bool indirect = false;
  bool stub_models = false;
};

class Session {
 public:
  Session(std::string command, const std::vector<std::string>& args, const Options& opts) : opts_(opts) {
    manifest_.command = std::move(command);
    manifest_.arguments = args;
    manifest_.started = utc_now();
    config_ = opts.config.empty() ? AppConfig{} : load_config(opts.config);
    for (const std::string& assignment : opts.set) {
      const auto eq = assignment.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + assignment + "'");
      set_config_value(config_, trim(std::string_view(assignment).substr(0, eq)),
                       trim(std::string_view(assignment).substr(eq + 1)));
    }
    if (opts.seed_given) set_config_value(config_, "seed", std::to_string(opts.seed));
    if (opts.folds != 0) config_.folds = opts.folds;
    if (!opts.variant.empty()) config_.ensemble.variant = parse_variant(opts.variant);
    if (opts.stub_models) config_.embedding.backing = EmbeddingProviderConfig::Backing::kStub;
    manifest_.config_digest = config_digest(config_);
    manifest_.seed = config_.seed;
  }

  const AppConfig& config() const { return config_; }
  RunManifest& manifest() { return manifest_; }
  const RunManifest& manifest() const { return manifest_; }

  LabeledCorpus corpus() {
    if (opts_.corpus.empty()) throw UsageError("--corpus is required");
    LabeledCorpus c = load_corpus(opts_.corpus);
    corpus_digest_ = file_digest(opts_.corpus);
    return c;
  }

  std::string run_id() const {
    return sha256_hex(manifest_.command + "|" + manifest_.config_digest + "|" + std::to_string(config_.seed) + "|" +
                      corpus_digest_)
        .substr(0, 16);
  }

  void artifact(const std::filesystem::path& p) { manifest_.artifacts.push_back(p.string()); }

  void finish(const std::filesystem::path& default_manifest) {
    manifest_.run_id = run_id();
    manifest_.finished = utc_now();
    std::filesystem::path path = opts_.manifest.empty() ? default_manifest : std::filesystem::path(opts_.manifest);
    manifest_.write(path);
  }

 private:
  const Options& opts_;
  AppConfig config_;
  RunManifest manifest_;
  std::string corpus_digest_;
};

std::filesystem::path manifest_beside(const std::string& out, const std::string& command) {
  if (out.empty()) return "assort-" + command + ".manifest.json";
  return out + ".manifest.json";
}

void write_reports(const std::string& prefix, std::span<const EvalReport> reports, Session& session,
                   std::ostream& out) {
  std::ostringstream table;
  write_reports_table(table, reports);
  out << table.str();
  if (prefix.empty()) return;
  std::ostringstream jsonl;
  write_reports_jsonl(jsonl, reports);
  write_text(prefix + ".jsonl", jsonl.str());
  write_text(prefix + ".txt", table.str());
  session.artifact(prefix + ".jsonl");
  session.artifact(prefix + ".txt");
}

EvalOptions eval_options(const Session& session) {
  EvalOptions o;
  o.averaging = session.config().averaging;
  o.parallelism = session.config().fold_parallelism;
  o.run_id = session.run_id();
  o.config_digest = session.manifest().config_digest;
  o.seed = session.config().seed;
  return o;
}

// ---------------------------------------------------------------------------

int cmd_ingest(Session& s, const Options& opts, std::ostream& out) {
  const LabeledCorpus corpus = s.corpus();
  std::array<std::size_t, kNumQuestionTypes> per_type{};
  std::size_t sentences = 0, gold = 0, untyped = 0;
  for (const AnswerPost& p : corpus.posts) {
    sentences += p.sentences.size();
    if (p.gold_summary) gold += p.gold_summary->size();
    if (auto t = post_type(corpus, p)) ++per_type[type_index(*t)];
    else ++untyped;
  }
  out << "questions " << corpus.questions.size() << "\nposts " << corpus.posts.size() << "\nsentences " << sentences
      << "\ngold_sentences " << gold << '\n';
  for (QuestionType t : kAllQuestionTypes) out << "posts_" << to_string(t) << ' ' << per_type[type_index(t)] << '\n';
  out << "posts_untyped " << untyped << '\n';
  if (!opts.out.empty()) {
    std::ostringstream text;
    write_corpus(text, corpus);
    write_text(opts.out, text.str());
    s.artifact(opts.out);
  }
  s.finish(manifest_beside(opts.out, "ingest"));
  return kExitOk;
}

int cmd_warm(Session& s, const Options& opts, std::ostream& out) {
  const LabeledCorpus corpus = s.corpus();
  Providers p = make_providers(s.config(), opts.stub_models, false);
  out << "cached " << warm_cache(*p.embedder, corpus) << " new vectors\n";
  s.finish(manifest_beside(opts.out, "warm"));
  return kExitOk;
}

int cmd_train(Session& s, const Options& opts, std::ostream& out) {
  if (opts.out.empty()) throw UsageError("train needs --out for the bundle path");
  const LabeledCorpus corpus = s.corpus();
  const AppConfig& config = s.config();
  Providers p = make_providers(config, opts.stub_models, false);
  const Featurizer featurizer = make_featurizer(config);
  const DataSplit split = split_corpus(corpus, config.split, config.seed);
  const TrainedBundle bundle = train_bundle(corpus, split, config.ensemble, featurizer, *p.embedder);
  std::filesystem::path path(opts.out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  bundle.save(path);
  s.artifact(path);
  out << "bundle " << path.string() << " theta " << bundle.theta << " train " << split.train.size() << " dev "
      << split.dev.size() << " test " << split.test.size() << '\n';
  s.finish(manifest_beside(opts.out, "train"));
  return kExitOk;
}

int cmd_summarize(Session& s, const Options& opts, std::ostream& out) {
  if (opts.indirect == !opts.bundle.empty()) throw UsageError("summarize needs exactly one of --bundle or --indirect");
  if (opts.post.empty()) throw UsageError("summarize needs --post");
  if (opts.format != "json" && opts.format != "html") throw UsageError("--format must be json or html");
  LabeledCorpus corpus = load_corpus(opts.post);
  if (!opts.post_id.empty()) {
    if (corpus.find_post(opts.post_id) == nullptr) throw DataError("no post " + opts.post_id + " in " + opts.post);
    corpus = select_posts(corpus, {opts.post_id});
  }
  const AppConfig& config = s.config();
  Providers p = make_providers(config, opts.stub_models, opts.indirect);
  std::vector<Summary> summaries;
  std::string system;
  if (opts.indirect) {
    system = "assort_is";
    for (const AnswerPost& post : corpus.posts)
      summaries.push_back(summarize_indirect(post, *p.summarizer, *p.nli, config.summary_max_tokens));
  } else {
    system = "assort_s";
    const TrainedBundle bundle = TrainedBundle::load(opts.bundle, p.embedder->fingerprint());
    const Featurizer featurizer = make_featurizer(config);
    for (const AnswerPost& post : corpus.posts)
      summaries.push_back(summarize_supervised(bundle, corpus.question_of(post), post, featurizer, *p.embedder));
  }

  std::string document;
  if (opts.format == "json") {
    for (const Summary& sum : summaries) document += summary_to_json(sum, system).dump() + "\n";
  } else {
    document = render_html(corpus.posts, summaries, system);
  }
  if (opts.out.empty()) {
    out << document;
  } else {
    write_text(opts.out, document);
    s.artifact(opts.out);
  }
  s.finish(manifest_beside(opts.out, "summarize"));
  return kExitOk;
}

std::vector<DataSplit> folds_for(const Session& s, const LabeledCorpus& corpus) {
  return kfold(corpus, s.config().folds, s.config().seed);
}

int cmd_eval(Session& s, const Options& opts, std::ostream& out) {
  const LabeledCorpus corpus = s.corpus();
  const AppConfig& config = s.config();
  Providers p = make_providers(config, opts.stub_models, opts.indirect);
  const Featurizer featurizer = make_featurizer(config);
  const auto splits = folds_for(s, corpus);
  const EvalOptions options = eval_options(s);

  std::vector<EvalReport> reports;
  SupervisedContext context{&featurizer, p.embedder.get(), nullptr};
  reports.push_back(evaluate(corpus, splits, supervised_factory(corpus, config.ensemble, context), options, "assort_s",
                             std::string(to_string(config.ensemble.variant))));
  if (opts.indirect)
    reports.push_back(
        evaluate(corpus, splits, indirect_factory(*p.summarizer, *p.nli, config.summary_max_tokens), options,
                 "assort_is"));
  reports.push_back(
      evaluate(corpus, splits, lead_k_factory(config.lead_k), options, "lead" + std::to_string(config.lead_k)));
  write_reports(opts.out, reports, s, out);
  s.finish(manifest_beside(opts.out, "eval"));
  return kExitOk;
}

int cmd_ablate(Session& s, const Options& opts, std::ostream& out) {
  const LabeledCorpus corpus = s.corpus();
  const AppConfig& config = s.config();
  Providers p = make_providers(config, opts.stub_models, false);
  const Featurizer featurizer = make_featurizer(config);
  const auto splits = folds_for(s, corpus);
  const EvalOptions options = eval_options(s);
  SupervisedContext context{&featurizer, p.embedder.get(), nullptr};
  std::vector<EvalReport> reports;
  for (AblationVariant v : kAllVariants)
    reports.push_back(run_ablation(v, corpus, splits, config.ensemble, context, options));
  write_reports(opts.out, reports, s, out);
  s.finish(manifest_beside(opts.out, "ablate"));
  return kExitOk;
}

int cmd_curve(Session& s, const Options& opts, std::ostream& out) {
  const LabeledCorpus corpus = s.corpus();
  const AppConfig& config = s.config();
  const std::vector<double> fractions = opts.fractions.empty() ? config.curve_fractions : parse_fractions(opts.fractions);
  Providers p = make_providers(config, opts.stub_models, true);
  const Featurizer featurizer = make_featurizer(config);
  const auto splits = folds_for(s, corpus);
  const EvalOptions options = eval_options(s);
  SupervisedContext context{&featurizer, p.embedder.get(), nullptr};
  const PredictorFactory indirect = indirect_factory(*p.summarizer, *p.nli, config.summary_max_tokens);
  const auto reports = low_resource_curve(corpus, splits, fractions, config.ensemble, context, options, &indirect);
  write_reports(opts.out, reports, s, out);
  s.finish(manifest_beside(opts.out, "curve"));
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

json RunManifest::to_json() const {
  return json{{"command", command}, {"arguments", arguments}, {"run_id", run_id},
              {"config_digest", config_digest}, {"seed", seed}, {"started", started},
              {"finished", finished}, {"artifacts", artifacts}};
}

void RunManifest::write(const std::filesystem::path& path) const { write_text(path, to_json().dump(2) + "\n"); }

Providers make_providers(const AppConfig& config, bool stub, bool indirect) {
  Providers p;
  if (stub) {
    p.embedder = std::make_unique<StubEmbedder>(config.embedding.dim, config.embedding.seed);
    p.summarizer = std::make_unique<StubSummarizer>(config.gateway.summarize_input_budget);
    p.nli = std::make_unique<StubNli>();
    return p;
  }
  p.client = std::make_shared<GatewayClient>(config.gateway.with_environment());
  if (indirect) {
    if (!p.client->healthy())
      throw ProviderError("inference sidecar at " + p.client->config().base_url +
                          " is not reachable; start it or pass --stub-models");
    p.summarizer = std::make_unique<RemoteSummarizer>(*p.client);
    p.nli = std::make_unique<RemoteNli>(*p.client);
  }
  p.embedder = make_embedding_provider(config.embedding, p.client);
  return p;
}

Featurizer make_featurizer(const AppConfig& config) {
  const LexiconPaths& l = config.lexicons;
  if (l.imperative_verbs.empty() && l.comparatives.empty() && l.superlatives.empty() && l.suffix_exclusions.empty() &&
      l.software_entities.empty())
    return Featurizer();
  Lexicons lex = Lexicons::load(l.imperative_verbs, l.comparatives, l.superlatives, l.suffix_exclusions,
                                l.software_entities);
  return Featurizer(std::move(lex));
}

json summary_to_json(const Summary& summary, std::string_view system) {
  return json{{"post", summary.post_id}, {"system", system}, {"selected", summary.selected},
              {"scores", summary.scores}};
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_html(std::span<const AnswerPost> posts, std::span<const Summary> summaries,
                        std::string_view system) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>assort summary</title>\n"
      << "<style>mark.assort-summary { background: #fff3a0; }</style>\n</head>\n<body>\n";
  for (const AnswerPost& post : posts) {
    const Summary* summary = nullptr;
    for (const Summary& s : summaries)
      if (s.post_id == post.id) summary = &s;
    std::vector<bool> selected(post.sentences.size(), false);
    if (summary != nullptr)
      for (std::size_t i : summary->selected)
        if (i < selected.size()) selected[i] = true;
    out << "<article data-post=\"" << html_escape(post.id) << "\" data-system=\"" << html_escape(system) << "\">\n";
    for (std::size_t i = 0; i < post.sentences.size(); ++i) {
      const std::string text = html_escape(post.sentences[i].text);
      if (selected[i])
        out << "<p><mark class=\"assort-summary\" data-index=\"" << i << "\">" << text << "</mark></p>\n";
      else
        out << "<p data-index=\"" << i << "\">" << text << "</p>\n";
    }
    out << "</article>\n";
  }
  out << "</body>\n</html>\n";
  return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extractive summaries of Stack Overflow answer posts", "assort"};
  app.require_subcommand(1);
  Options opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Flat key = value configuration file");
    sub->add_option("--set", opts.set, "Override one config key (key=value); repeatable");
    sub->add_option("--seed", opts.seed, "Master seed")->each([&](const std::string&) { opts.seed_given = true; });
    sub->add_flag("--stub-models", opts.stub_models, "Use deterministic offline providers");
    sub->add_option("--out", opts.out, "Output path (prefix for reports)");
    sub->add_option("--manifest", opts.manifest, "Run manifest path");
  };

  auto* ingest = app.add_subcommand("ingest", "Validate a corpus file and print statistics");
  ingest->add_option("--corpus", opts.corpus)->required();
  add_common(ingest);

  auto* warm = app.add_subcommand("warm", "Fill the embedding cache for every corpus sentence");
  warm->add_option("--corpus", opts.corpus)->required();
  add_common(warm);

  auto* train = app.add_subcommand("train", "Train a supervised bundle");
  train->add_option("--corpus", opts.corpus)->required();
  train->add_option("--variant", opts.variant, "Ablation variant");
  add_common(train);

  auto* summarize = app.add_subcommand("summarize", "Summarize posts");
  summarize->add_option("--bundle", opts.bundle, "Trained bundle");
  summarize->add_flag("--indirect", opts.indirect, "Use the summarize-then-entail pipeline");
  summarize->add_option("--post", opts.post, "Corpus-format file with the posts")->required();
  summarize->add_option("--post-id", opts.post_id, "Only this post");
  summarize->add_option("--format", opts.format, "json or html");
  add_common(summarize);

  auto* eval = app.add_subcommand("eval", "k-fold evaluation against the lead baseline");
  eval->alias("evaluate");
  eval->add_option("--corpus", opts.corpus)->required();
  eval->add_option("--folds", opts.folds, "Number of folds");
  eval->add_option("--variant", opts.variant, "Ablation variant");
  eval->add_flag("--indirect", opts.indirect, "Also evaluate the summarize-then-entail pipeline");
  add_common(eval);

  auto* ablate = app.add_subcommand("ablate", "Evaluate all five ablation variants");
  ablate->add_option("--corpus", opts.corpus)->required();
  ablate->add_option("--folds", opts.folds, "Number of folds");
  add_common(ablate);

  auto* curve = app.add_subcommand("curve", "Low-resource learning curve");
  curve->add_option("--corpus", opts.corpus)->required();
  curve->add_option("--folds", opts.folds, "Number of folds");
  curve->add_option("--fractions", opts.fractions, "Comma-separated training fractions");
  add_common(curve);

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("assort");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Session session(sub->get_name(), args, opts);
    if (sub == ingest) return cmd_ingest(session, opts, out);
    if (sub == warm) return cmd_warm(session, opts, out);
    if (sub == train) return cmd_train(session, opts, out);
    if (sub == summarize) return cmd_summarize(session, opts, out);
    if (sub == eval) return cmd_eval(session, opts, out);
    if (sub == ablate) return cmd_ablate(session, opts, out);
    if (sub == curve) return cmd_curve(session, opts, out);
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ProviderError& e) {
    err << "error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace assort
