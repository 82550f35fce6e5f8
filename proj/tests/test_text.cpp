#include <doctest.h>

#include "forge/text.hpp"

using namespace forge;

namespace {

std::vector<std::string> toks(std::string_view s) {
  return text::token_texts(text::tokenize(s));
}

}  // namespace

TEST_SUITE("text") {

TEST_CASE("tokenize splits words and punctuation") {
  CHECK(toks("Breakfast in America is a pop album.") ==
        std::vector<std::string>{"Breakfast", "in", "America", "is", "a",
                                 "pop", "album", "."});
  CHECK(toks("") == std::vector<std::string>{});
  CHECK(toks("   ") == std::vector<std::string>{});
}

TEST_CASE("tokenize keeps digit-joined punctuation inside one token") {
  CHECK(toks("46:06") == std::vector<std::string>{"46:06"});
  CHECK(toks("1,000") == std::vector<std::string>{"1,000"});
  CHECK(toks("3.5") == std::vector<std::string>{"3.5"});
  // The same characters between non-digits split.
  CHECK(toks("a:b") == std::vector<std::string>{"a", ":", "b"});
  CHECK(toks("end.") == std::vector<std::string>{"end", "."});
}

TEST_CASE("tokenize joins hyphens and ampersands between word characters") {
  CHECK(toks("art-rock") == std::vector<std::string>{"art-rock"});
  CHECK(toks("A&M") == std::vector<std::string>{"A&M"});
  CHECK(toks("- dash") == std::vector<std::string>{"-", "dash"});
  CHECK(toks("rock & roll") == std::vector<std::string>{"rock", "&", "roll"});
}

TEST_CASE("tokenize treats non-ASCII bytes as word bytes") {
  // En dash (U+2013) joins the two month names into one surface token.
  CHECK(toks("May–December 1978") ==
        std::vector<std::string>{"May–December", "1978"});
}

TEST_CASE("tokenize splits possessive and negation clitics") {
  CHECK(toks("Peter Henderson's album") ==
        std::vector<std::string>{"Peter", "Henderson", "'s", "album"});
  CHECK(toks("don't stop") == std::vector<std::string>{"do", "n't", "stop"});
  CHECK(toks("isn't") == std::vector<std::string>{"is", "n't"});
}

TEST_CASE("token byte ranges point back into the source string") {
  const std::string s = "Henderson's album, 46:06.";
  for (const text::Token& t : text::tokenize(s)) {
    CHECK(s.substr(t.begin, t.end - t.begin) == t.text);
  }
}

TEST_CASE("character class helpers") {
  CHECK(text::lower("A&M Records") == "a&m records");
  CHECK(text::is_all_digits("1979"));
  CHECK_FALSE(text::is_all_digits("46:06"));
  CHECK_FALSE(text::is_all_digits(""));
  CHECK(text::is_all_punct("..."));
  CHECK(text::is_all_punct("?"));
  CHECK_FALSE(text::is_all_punct("n't"));
  CHECK(text::starts_upper("Breakfast"));
  CHECK_FALSE(text::starts_upper("breakfast"));
  CHECK_FALSE(text::starts_upper(""));
}

TEST_CASE("first-letter casing") {
  CHECK(text::capitalize_first("the album") == "The album");
  CHECK(text::decapitalize_first("The album") == "the album");
  CHECK(text::capitalize_first("") == "");
  CHECK(text::capitalize_first("1979") == "1979");
}

TEST_CASE("stem strips plurals and participles") {
  CHECK(text::stem("recorded") == "record");
  CHECK(text::stem("records") == "record");
  CHECK(text::stem("recording") == "record");
  // "recorder" keeps its agentive ending; alignment treats it as a prefix
  // match, not an exact one.
  CHECK(text::stem("recorder") == "recorder");
  CHECK(text::stem("released") == text::stem("release"));
  CHECK(text::stem("genres") == text::stem("genre"));
  CHECK(text::stem("albums") == "album");
  CHECK(text::stem("Studios") == "studio");
  CHECK(text::stem("is") == "is");
  CHECK(text::stem("classes") == text::stem("class"));
}

TEST_CASE("common_prefix_length") {
  CHECK(text::common_prefix_length("record", "recorder") == 6);
  CHECK(text::common_prefix_length("abc", "abd") == 2);
  CHECK(text::common_prefix_length("", "abc") == 0);
}

TEST_CASE("join") {
  CHECK(text::join({"a", "b", "c"}, ", ") == "a, b, c");
  CHECK(text::join({}, ", ") == "");
  CHECK(text::join({"one"}, " ; ") == "one");
}

TEST_CASE("split_lines handles CRLF and missing final newline") {
  const auto lines = text::split_lines("a\r\nb\nc");
  CHECK(lines == std::vector<std::string>{"a", "b", "c"});
  CHECK(text::split_lines("") == std::vector<std::string>{});
  CHECK(text::split_lines("x\n") == std::vector<std::string>{"x"});
  CHECK(text::split_lines("\n\n") == std::vector<std::string>{"", ""});
}

}  // TEST_SUITE
