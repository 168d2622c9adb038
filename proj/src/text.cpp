#include "assort/text.hpp"

#include <array>
#include <cctype>

#include <openssl/evp.h>

#include "assort/error.hpp"

namespace assort {
namespace {

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> word_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (word_char(c)) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> entity_tokens(std::string_view text, bool lowercase) {
  auto inner = [](char c) {
    return word_char(c) || c == '.' || c == '-' || c == '+' || c == '#';
  };
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !inner(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && inner(text[j])) ++j;
    std::string_view tok = text.substr(i, j - i);
    // Trailing sentence punctuation and leading dots/dashes are not part
    // of an entity; trailing '+' and '#' are ("c++", "c#").
    while (!tok.empty() && (tok.back() == '.' || tok.back() == '-')) tok.remove_suffix(1);
    while (!tok.empty() && (tok.front() == '.' || tok.front() == '-' || tok.front() == '+')) tok.remove_prefix(1);
    if (!tok.empty()) out.push_back(lowercase ? to_lower(tok) : std::string(tok));
    i = j;
  }
  return out;
}

std::vector<std::string> alpha_words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c)) || (c == '\'' && !current.empty())) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!current.empty()) {
      while (!current.empty() && current.back() == '\'') current.pop_back();
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    }
  }
  while (!current.empty() && current.back() == '\'') current.pop_back();
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

}  // namespace assort
