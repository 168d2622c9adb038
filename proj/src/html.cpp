#include "assort/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>

namespace assort {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x110000) {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Abbreviations that end in a period but do not end a sentence.
constexpr std::array<std::string_view, 12> kAbbreviations = {
    "e.g.", "i.e.", "eg.", "ie.", "vs.", "cf.", "mr.", "mrs.", "dr.", "approx.", "fig.", "no."};

bool ends_with_abbreviation(std::string_view text, std::size_t dot) {
  std::size_t start = dot;
  while (start > 0 && !is_space(text[start - 1]) && text[start - 1] != '(') --start;
  const std::string token = lower(text.substr(start, dot + 1 - start));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end();
}

bool is_closer(char c) { return c == ')' || c == '"' || c == '\'' || c == ']'; }
bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// ---------------------------------------------------------------------------
// Tokenizer

struct Tag {
  std::string name;
  bool closing = false;
  bool self_closing = false;
};

struct Token {
  std::optional<Tag> tag;  // empty for text
  std::string_view text;
};

std::vector<Token> tokenize(std::string_view html) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t text_start = 0;
  auto flush_text = [&](std::size_t end) {
    if (end > text_start) out.push_back({std::nullopt, html.substr(text_start, end - text_start)});
  };
  while (i < html.size()) {
    if (html[i] != '<' || i + 1 >= html.size()) {
      ++i;
      continue;
    }
    const char next = html[i + 1];
    if (html.substr(i, 4) == "<!--") {
      flush_text(i);
      const std::size_t end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      text_start = i;
      continue;
    }
    if (!(is_alpha(next) || next == '/' || next == '!')) {
      ++i;
      continue;
    }
    // Find the closing '>' while respecting quoted attribute values.
    std::size_t j = i + 1;
    char quote = 0;
    while (j < html.size()) {
      const char c = html[j];
      if (quote != 0) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '>') {
        break;
      }
      ++j;
    }
    if (j >= html.size()) break;  // unterminated tag: the rest is text
    flush_text(i);
    Tag tag;
    std::size_t k = i + 1;
    if (html[k] == '/') {
      tag.closing = true;
      ++k;
    }
    const std::size_t name_start = k;
    while (k < j && (is_alnum(html[k]) || html[k] == '!')) ++k;
    tag.name = lower(html.substr(name_start, k - name_start));
    tag.self_closing = j > i + 1 && html[j - 1] == '/';
    out.push_back({std::move(tag), {}});
    i = j + 1;
    text_start = i;
  }
  flush_text(html.size());
  return out;
}

bool is_block_tag(std::string_view name) {
  static constexpr std::array<std::string_view, 26> kBlocks = {
      "p",     "div",   "li",    "ul",    "ol",      "h1",      "h2",      "h3",     "h4",
      "h5",    "h6",    "blockquote", "br", "hr",   "table",   "tr",      "td",     "th",
      "thead", "tbody", "dl",    "dt",    "dd",      "section", "article", "pre"};
  return std::find(kBlocks.begin(), kBlocks.end(), name) != kBlocks.end();
}

// ---------------------------------------------------------------------------
// Block assembly

class SentenceBuilder {
 public:
  void append_text(std::string_view raw, bool bold, bool code) {
    const std::string decoded = decode_entities(raw);
    for (char c : decoded) {
      buffer_ += is_space(c) ? ' ' : c;
      bold_.push_back(bold);
      code_.push_back(code);
    }
  }

  void start_list_item() {
    flush();
    pending_list_item_ = true;
  }

  void end_list_item() {
    flush();
    pending_list_item_ = false;
  }

  void code_block() {
    flush();
    if (!sentences_.empty()) sentences_.back().precedes_code_block = true;
    pending_follow_ = true;
  }

  void flush() {
    if (buffer_.empty()) return;
    // Collapse whitespace runs while keeping the masks aligned.
    std::string text;
    std::vector<bool> bold, code;
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      if (buffer_[i] == ' ' && (text.empty() || text.back() == ' ')) continue;
      text += buffer_[i];
      bold.push_back(bold_[i]);
      code.push_back(code_[i]);
    }
    buffer_.clear();
    bold_.clear();
    code_.clear();

    for (auto [begin, end] : split_sentences(text, code)) {
      const std::string_view piece = std::string_view(text).substr(begin, end - begin);
      if (std::none_of(piece.begin(), piece.end(), is_alnum)) continue;
      Sentence s;
      s.text = std::string(piece);
      for (std::size_t i = begin; i < end; ++i) {
        if (text[i] == ' ') continue;
        s.is_bold = s.is_bold || bold[i];
        s.has_inline_code = s.has_inline_code || code[i];
      }
      if (pending_list_item_) {
        s.is_list_item_first = true;
        pending_list_item_ = false;
      }
      if (pending_follow_) {
        s.follows_code_block = true;
        pending_follow_ = false;
      }
      sentences_.push_back(std::move(s));
    }
  }

  std::vector<Sentence> finish() {
    flush();
    for (std::size_t i = 0; i < sentences_.size(); ++i) {
      sentences_[i].index = i;
      sentences_[i].total_in_post = sentences_.size();
    }
    return std::move(sentences_);
  }

 private:
  std::string buffer_;
  std::vector<bool> bold_;
  std::vector<bool> code_;
  std::vector<Sentence> sentences_;
  bool pending_list_item_ = false;
  bool pending_follow_ = false;
};

}  // namespace

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out += text[i++];
      continue;
    }
    const std::size_t semi = text.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out += text[i++];
      continue;
    }
    const std::string_view name = text.substr(i + 1, semi - i - 1);
    std::optional<std::uint32_t> cp;
    if (name == "lt") cp = '<';
    else if (name == "gt") cp = '>';
    else if (name == "amp") cp = '&';
    else if (name == "quot") cp = '"';
    else if (name == "apos") cp = '\'';
    else if (name == "nbsp") cp = ' ';
    else if (name.size() > 1 && name[0] == '#') {
      std::uint32_t value = 0;
      bool ok = true;
      if (name[1] == 'x' || name[1] == 'X') {
        ok = name.size() > 2;
        for (char c : name.substr(2)) {
          if (!std::isxdigit(static_cast<unsigned char>(c))) { ok = false; break; }
          value = value * 16 + static_cast<std::uint32_t>(is_digit(c) ? c - '0' : (std::tolower(c) - 'a' + 10));
        }
      } else {
        for (char c : name.substr(1)) {
          if (!is_digit(c)) { ok = false; break; }
          value = value * 10 + static_cast<std::uint32_t>(c - '0');
        }
      }
      if (ok) cp = value;
    }
    if (!cp) {
      out += text[i++];
      continue;
    }
    append_utf8(out, *cp);
    i = semi + 1;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> split_sentences(
    std::string_view text, const std::vector<bool>& protected_mask) {
  auto is_protected = [&](std::size_t i) { return i < protected_mask.size() && protected_mask[i]; };
  std::vector<std::pair<std::size_t, std::size_t>> out;
  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (end > begin) out.emplace_back(begin, end);
  };

  std::size_t start = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_terminal(text[i]) || is_protected(i)) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && (is_terminal(text[j]) || is_closer(text[j])) && !is_protected(j)) ++j;
    if (j == text.size()) {
      emit(start, j);
      start = j;
      break;
    }
    if (!is_space(text[j])) {
      i = j;
      continue;
    }
    std::size_t k = j;
    while (k < text.size() && is_space(text[k])) ++k;
    bool boundary = k == text.size();
    if (!boundary) {
      std::size_t first = k;
      if (text[first] == '"' || text[first] == '(' || text[first] == '\'') ++first;
      boundary = first < text.size() &&
                 (is_upper(text[first]) || is_digit(text[first]) || is_protected(first));
    }
    if (boundary && text[i] == '.' && ends_with_abbreviation(text, i)) boundary = false;
    if (boundary) {
      emit(start, j);
      start = k;
    }
    i = k;
  }
  if (start < text.size()) emit(start, text.size());
  return out;
}

std::vector<Sentence> parse_post_html(std::string_view html) {
  SentenceBuilder builder;
  int pre_depth = 0;
  int bold_depth = 0;
  int code_depth = 0;
  int skip_depth = 0;

  for (const Token& token : tokenize(html)) {
    if (!token.tag) {
      if (pre_depth > 0 || skip_depth > 0) continue;
      builder.append_text(token.text, bold_depth > 0, code_depth > 0);
      continue;
    }
    const Tag& tag = *token.tag;
    if (tag.name == "pre") {
      if (!tag.closing) {
        if (pre_depth == 0) builder.code_block();
        ++pre_depth;
      } else if (pre_depth > 0) {
        --pre_depth;
      }
      continue;
    }
    if (pre_depth > 0) continue;
    if (tag.name == "script" || tag.name == "style") {
      if (!tag.closing && !tag.self_closing) ++skip_depth;
      else if (tag.closing && skip_depth > 0) --skip_depth;
      continue;
    }
    if (tag.name == "b" || tag.name == "strong") {
      if (tag.closing) bold_depth = std::max(0, bold_depth - 1);
      else if (!tag.self_closing) ++bold_depth;
      continue;
    }
    if (tag.name == "code") {
      if (tag.closing) code_depth = std::max(0, code_depth - 1);
      else if (!tag.self_closing) ++code_depth;
      continue;
    }
    if (tag.name == "li") {
      bold_depth = code_depth = 0;
      if (tag.closing) builder.end_list_item();
      else builder.start_list_item();
      continue;
    }
    if (is_block_tag(tag.name)) {
      if (tag.closing) bold_depth = code_depth = 0;
      builder.flush();
      continue;
    }
    // Inline tags (a, em, i, span, kbd, ...) contribute nothing but a word
    // boundary is not implied.
  }
  return builder.finish();
}

}  // namespace assort
