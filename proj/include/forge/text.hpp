#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace forge::text {

// A surface token with its byte range in the source string, so callers can
// splice edits back into the original text without disturbing spacing.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

// Whitespace + punctuation tokenizer. Words are runs of alphanumeric bytes
// (non-ASCII bytes count as letters); '-' joins two word characters,
// '.', ',' and ':' join two digits, '&' joins two alphanumerics. Trailing
// "'s" and "n't" split off as their own tokens. Every other punctuation
// byte is a single-character token.
std::vector<Token> tokenize(std::string_view s);

std::vector<std::string> token_texts(const std::vector<Token>& tokens);

// ASCII-only case folding; non-ASCII bytes pass through.
std::string lower(std::string_view s);

bool is_all_digits(std::string_view s);
bool is_all_punct(std::string_view s);
bool starts_upper(std::string_view s);

// First-letter uppercase (ASCII), used when re-assembling sentences.
std::string capitalize_first(std::string s);
std::string decapitalize_first(std::string s);

// Fixed suffix-stripping stemmer used by row/hypothesis alignment: plural
// endings, -ed/-ing participles (with doubled-consonant undoubling), and a
// final -e, so "release"/"released" stem identically.
std::string stem(std::string_view word);

std::size_t common_prefix_length(std::string_view a, std::string_view b);

std::string join(const std::vector<std::string>& parts,
                 std::string_view separator);

std::vector<std::string> split_lines(std::string_view s);

}  // namespace forge::text
