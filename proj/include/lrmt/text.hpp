#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace lrmt {

using Tokens = std::vector<std::string>;

/// Splits on any Unicode whitespace code point (UTF-8 input). Invalid byte
/// sequences are kept verbatim inside tokens.
Tokens split_whitespace(std::string_view text);

std::string join(const Tokens& tokens, std::string_view sep = " ");

/// Decodes UTF-8 into code points; malformed bytes decode as U+FFFD.
std::u32string decode_utf8(std::string_view text);

/// Simple case folding: ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t fold_case(char32_t c);

std::u32string fold_case(std::u32string_view text);

/// Plain Levenshtein distance over code points (unit costs).
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);

}  // namespace lrmt
