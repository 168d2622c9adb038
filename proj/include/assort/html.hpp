#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "assort/types.hpp"

namespace assort {

// Splits an answer-post HTML fragment into ordered prose sentences.
//
// <pre> blocks are dropped from the text; the nearest sentence before a
// block gets precedes_code_block and the nearest one after it gets
// follows_code_block. <b>/<strong> set is_bold, inline <code> sets
// has_inline_code, and the first sentence inside each <li> sets
// is_list_item_first. Sentences never span block elements. Unclosed tags
// are tolerated. An empty result means the post has no prose.
std::vector<Sentence> parse_post_html(std::string_view html);

// Sentence boundary detection over plain text. `protected_mask`, when
// non-empty, marks characters (by byte offset) inside code spans where no
// boundary may be placed. Returns [begin, end) byte ranges.
std::vector<std::pair<std::size_t, std::size_t>> split_sentences(
    std::string_view text, const std::vector<bool>& protected_mask = {});

// Decodes the handful of HTML entities that appear in Q&A posts.
std::string decode_entities(std::string_view text);

}  // namespace assort
