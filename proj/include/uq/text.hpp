#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace uq::text {

// Lowercased tokens split on whitespace and punctuation, deduplicated.
std::set<std::string> token_set(std::string_view utf8);

// Sentences ending in . ! or ? followed by whitespace. A text without a
// terminator is a single sentence; blank text yields no sentences.
std::vector<std::string> split_sentences(std::string_view utf8);

std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view text);

}  // namespace uq::text
