#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace assort {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);

// Lowercased runs of ASCII letters, digits and '_'. Used for title
// features and the stub embedder.
std::vector<std::string> word_tokens(std::string_view text);

// Lowercased whitespace-delimited tokens with surrounding punctuation
// stripped but inner '.', '_', '-', '+', '#' kept ("node.js", "c++").
// Used for entity matching; `lowercase=false` keeps the original case.
std::vector<std::string> entity_tokens(std::string_view text, bool lowercase = true);

// Lowercased alphabetic words (apostrophes kept, "don't"). Used by the
// adjective and imperative detectors.
std::vector<std::string> alpha_words(std::string_view text);

// Lowercase hex SHA-256 of the UTF-8 bytes.
std::string sha256_hex(std::string_view data);

}  // namespace assort
