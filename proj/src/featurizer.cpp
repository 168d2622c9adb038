#include "assort/featurizer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "assort/error.hpp"
#include "assort/text.hpp"

namespace assort {

namespace resources {
extern const std::string_view kImperativeVerbs;
extern const std::string_view kComparatives;
extern const std::string_view kSuperlatives;
extern const std::string_view kSuffixExclusions;
}  // namespace resources

const std::array<std::string_view, kNumPatterns> kLinguisticPatterns = {
    "However,",        "First,",        "In short,",     "In this case,",     "In general,",
    "Finally,",        "Then,",         "Alternatively,", "In other words,",  "In addition,",
    "In practice,",    "In fact,",      "Otherwise,",     "If you care,",     "In contrast,",
    "On the other hand,", "Below is",   "Additionally,",  "Furthermore,"};

namespace {

// Openers skipped before looking for the imperative verb.
const std::set<std::string> kLeadingAdverbs = {
    "first",  "then",     "just",   "simply", "now",      "also",      "next",    "finally",
    "instead", "alternatively", "additionally", "otherwise", "so", "and", "but", "or",
    "please", "always",   "never",  "basically", "second", "secondly", "lastly", "thirdly"};

// A sentence opening with one of these has an explicit subject.
const std::set<std::string> kPronounsAndDeterminers = {
    "i",    "you",  "he",   "she",   "it",    "we",   "they",  "this",  "that",  "these",
    "those", "the", "a",    "an",    "my",    "your", "his",   "her",   "its",   "our",
    "their", "there", "some", "any", "each",  "every", "no",   "one"};

// Context that marks a preceding/following -er word as a comparative.
const std::set<std::string> kComparativeCues = {
    "is",  "are",  "was",   "were",   "be",     "been",  "much",    "far",  "even", "slightly",
    "lot", "bit",  "get",   "gets",   "getting", "become", "becomes", "way", "no",   "any"};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool starts_with_ci(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[i])) != std::tolower(static_cast<unsigned char>(prefix[i])))
      return false;
  }
  return true;
}

std::set<std::string> read_list_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_word_list(buffer.str());
}

}  // namespace

std::set<std::string> parse_word_list(std::string_view text) {
  std::set<std::string> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') out.insert(to_lower(line));
    start = end + 1;
  }
  return out;
}

const Lexicons& Lexicons::defaults() {
  static const Lexicons lexicons = [] {
    Lexicons l;
    l.imperative_verbs = parse_word_list(resources::kImperativeVerbs);
    l.comparatives = parse_word_list(resources::kComparatives);
    l.superlatives = parse_word_list(resources::kSuperlatives);
    l.suffix_exclusions = parse_word_list(resources::kSuffixExclusions);
    return l;
  }();
  return lexicons;
}

Lexicons Lexicons::load(const std::filesystem::path& imperative_verbs, const std::filesystem::path& comparatives,
                        const std::filesystem::path& superlatives, const std::filesystem::path& suffix_exclusions,
                        const std::filesystem::path& software_entities) {
  Lexicons l = defaults();
  if (!imperative_verbs.empty()) l.imperative_verbs = read_list_file(imperative_verbs);
  if (!comparatives.empty()) l.comparatives = read_list_file(comparatives);
  if (!superlatives.empty()) l.superlatives = read_list_file(superlatives);
  if (!suffix_exclusions.empty()) l.suffix_exclusions = read_list_file(suffix_exclusions);
  if (!software_entities.empty()) l.software_entities = read_list_file(software_entities);
  return l;
}

// ---------------------------------------------------------------------------

bool LexiconEntityRecognizer::identifier_shaped(std::string_view raw) {
  bool lower_seen = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(raw[i]);
    if (std::islower(c)) lower_seen = true;
    else if (std::isupper(c) && lower_seen) return true;  // camelCase / PascalCase
    if (c == '_' || c == '+' || c == '#') return true;
    if (c == '.' && i > 0 && i + 1 < raw.size() && std::isalnum(static_cast<unsigned char>(raw[i + 1])))
      return true;
  }
  return false;
}


std::set<std::string> LexiconEntityRecognizer::question_entities(const QuestionRecord& question) const {
  std::set<std::string> tags;
  for (const std::string& tag : question.tags) {
    const std::string t = to_lower(trim(tag));
    if (!t.empty()) tags.insert(t);
  }
  std::set<std::string> out = tags;
  for (const std::string& raw : entity_tokens(question.title, false)) {
    const std::string tok = to_lower(raw);
    if (tags.count(tok) || known_.count(tok) || identifier_shaped(raw)) out.insert(tok);
  }
  return out;
}

std::set<std::string> LexiconEntityRecognizer::sentence_entities(const QuestionRecord& question,
                                                                 const Sentence& sentence) const {
  const std::set<std::string> lexicon = question_entities(question);
  std::set<std::string> out;
  for (const std::string& raw : entity_tokens(sentence.text, false)) {
    const std::string tok = to_lower(raw);
    if (lexicon.count(tok) || known_.count(tok) || identifier_shaped(raw)) out.insert(tok);
  }
  return out;
}

// ---------------------------------------------------------------------------

Featurizer::Featurizer() : Featurizer(Lexicons::defaults()) {}

Featurizer::Featurizer(Lexicons lexicons, std::shared_ptr<const EntityRecognizer> recognizer)
    : lexicons_(std::move(lexicons)), recognizer_(std::move(recognizer)) {
  if (!recognizer_) recognizer_ = std::make_shared<LexiconEntityRecognizer>(lexicons_.software_entities);
}

double Featurizer::entity_overlap(const QuestionRecord& question, const Sentence& sentence) const {
  const auto eq = recognizer_->question_entities(question);
  if (eq.empty()) return 0.0;
  const auto es = recognizer_->sentence_entities(question, sentence);
  std::size_t shared = 0;
  for (const std::string& e : eq) shared += es.count(e);
  return static_cast<double>(shared) / static_cast<double>(eq.size());
}

bool Featurizer::has_comparative(std::string_view text) const {
  const auto words = alpha_words(text);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i];
    if (lexicons_.comparatives.count(w)) return true;
    if (w.size() > 4 && ends_with(w, "er") && !lexicons_.suffix_exclusions.count(w)) {
      const bool than_follows = i + 1 < words.size() && words[i + 1] == "than";
      const bool cue_precedes = i > 0 && kComparativeCues.count(words[i - 1]);
      if (than_follows || cue_precedes) return true;
    }
  }
  return false;
}

bool Featurizer::has_superlative(std::string_view text) const {
  for (const std::string& w : alpha_words(text)) {
    if (lexicons_.superlatives.count(w)) return true;
    if (w.size() > 4 && ends_with(w, "est") && !lexicons_.suffix_exclusions.count(w)) return true;
  }
  return false;
}

bool Featurizer::is_imperative(std::string_view text) const {
  std::string_view rest = trim(text);
  // A leading discourse phrase ("In this case, ...") is not the verb.
  for (std::string_view pattern : kLinguisticPatterns) {
    if (pattern.back() == ',' && starts_with_ci(rest, pattern)) {
      rest.remove_prefix(pattern.size());
      break;
    }
  }
  const auto words = alpha_words(rest);
  std::size_t i = 0;
  while (i < words.size() && kLeadingAdverbs.count(words[i])) ++i;
  if (i == words.size()) return false;
  if (kPronounsAndDeterminers.count(words[i])) return false;
  return lexicons_.imperative_verbs.count(words[i]) != 0;
}

std::array<bool, kNumPatterns> Featurizer::match_patterns(std::string_view text) {
  const std::string_view s = trim(text);
  std::array<bool, kNumPatterns> out{};
  for (std::size_t j = 0; j < kNumPatterns; ++j) out[j] = starts_with_ci(s, kLinguisticPatterns[j]);
  return out;
}

std::pair<double, bool> Featurizer::structural(const Sentence& sentence) {
  const double position = sentence.total_in_post <= 1
                              ? 0.0
                              : static_cast<double>(sentence.index) / static_cast<double>(sentence.total_in_post - 1);
  return {position, sentence.precedes_code_block || sentence.follows_code_block};
}

std::array<bool, 3> Featurizer::stylistic(const Sentence& sentence) {
  return {sentence.has_inline_code, sentence.is_bold, sentence.is_list_item_first};
}

DomainFeatures Featurizer::build(const QuestionRecord& question, const Sentence& sentence) const {
  DomainFeatures f;
  const auto patterns = match_patterns(sentence.text);
  for (std::size_t j = 0; j < kNumPatterns; ++j) f.values[j] = patterns[j] ? 1.0 : 0.0;
  f.values[DomainFeatures::kEntityOverlap] = entity_overlap(question, sentence);
  f.values[DomainFeatures::kComparative] = has_comparative(sentence.text) ? 1.0 : 0.0;
  f.values[DomainFeatures::kSuperlative] = has_superlative(sentence.text) ? 1.0 : 0.0;
  f.values[DomainFeatures::kImperative] = is_imperative(sentence.text) ? 1.0 : 0.0;
  const auto [position, adjacent] = structural(sentence);
  f.values[DomainFeatures::kPosition] = position;
  f.values[DomainFeatures::kCodeAdjacent] = adjacent ? 1.0 : 0.0;
  const auto style = stylistic(sentence);
  f.values[DomainFeatures::kInlineCode] = style[0] ? 1.0 : 0.0;
  f.values[DomainFeatures::kBold] = style[1] ? 1.0 : 0.0;
  f.values[DomainFeatures::kListStep] = style[2] ? 1.0 : 0.0;
  return f;
}

}  // namespace assort
