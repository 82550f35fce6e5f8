#include "forge/text.hpp"

#include <algorithm>
#include <cctype>

namespace forge::text {

namespace {

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

bool is_digit(unsigned char c) { return std::isdigit(c) != 0; }

bool is_alnum(unsigned char c) { return std::isalnum(c) != 0; }

// True when the byte at position i continues the current word run.
bool joins_word(std::string_view s, std::size_t i) {
  const unsigned char c = s[i];
  if (is_word_byte(c)) return true;
  if (i == 0 || i + 1 >= s.size()) return false;
  const unsigned char prev = s[i - 1];
  const unsigned char next = s[i + 1];
  if (c == '-') return is_word_byte(prev) && is_word_byte(next);
  if (c == '.' || c == ',' || c == ':') return is_digit(prev) && is_digit(next);
  if (c == '&') return is_alnum(prev) && is_alnum(next);
  if (c == '\'') return is_word_byte(prev) && is_word_byte(next);
  return false;
}

void push_word(std::vector<Token>& out, std::string_view s, std::size_t begin,
               std::size_t end) {
  std::string_view w = s.substr(begin, end - begin);
  auto emit = [&](std::size_t b, std::size_t e) {
    out.push_back(Token{std::string(s.substr(b, e - b)), b, e});
  };
  // Clitic splits: "Henderson's" -> Henderson + 's ; "don't" -> do + n't.
  if (w.size() > 2) {
    std::string tail2 = lower(w.substr(w.size() - 2));
    if (tail2 == "'s") {
      emit(begin, end - 2);
      emit(end - 2, end);
      return;
    }
  }
  if (w.size() > 3) {
    std::string tail3 = lower(w.substr(w.size() - 3));
    if (tail3 == "n't") {
      emit(begin, end - 3);
      emit(end - 3, end);
      return;
    }
  }
  emit(begin, end);
}

}  // namespace

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = s[i];
    if (std::isspace(c) != 0) {
      ++i;
      continue;
    }
    if (is_word_byte(c)) {
      std::size_t begin = i;
      ++i;
      while (i < s.size() && joins_word(s, i)) ++i;
      push_word(out, s, begin, i);
      continue;
    }
    out.push_back(Token{std::string(1, static_cast<char>(c)), i, i + 1});
    ++i;
  }
  return out;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const Token& t : tokens) out.push_back(t.text);
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool is_all_digits(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return is_digit(c); });
}

bool is_all_punct(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c < 0x80 && std::ispunct(c) != 0;
  });
}

bool starts_upper(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0])) != 0;
}

std::string capitalize_first(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::string decapitalize_first(std::string s) {
  if (!s.empty()) {
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  }
  return s;
}

namespace {

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::string stem(std::string_view word) {
  std::string s = lower(word);
  if (s.size() <= 3) return s;
  if (ends_with(s, "sses")) {
    s.resize(s.size() - 2);
  } else if (ends_with(s, "ies") && s.size() > 4) {
    s.resize(s.size() - 3);
    s += 'y';
  } else if (ends_with(s, "s") && !ends_with(s, "ss") && !ends_with(s, "us") &&
             !ends_with(s, "is")) {
    s.pop_back();
  }
  if (s.size() >= 6 && ends_with(s, "ing")) {
    s.resize(s.size() - 3);
  } else if (s.size() >= 5 && ends_with(s, "ed")) {
    s.resize(s.size() - 2);
  }
  if (s.size() >= 4 && s[s.size() - 1] == s[s.size() - 2] &&
      !is_vowel(s.back())) {
    s.pop_back();
  }
  if (s.size() >= 5 && s.back() == 'e') s.pop_back();
  return s;
}

std::size_t common_prefix_length(std::string_view a, std::string_view b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < n && a[i] == b[i]) ++i;
  return i;
}

std::string join(const std::vector<std::string>& parts,
                 std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += separator;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view s) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t nl = s.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (pos < s.size()) lines.emplace_back(s.substr(pos));
      break;
    }
    std::string_view line = s.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = nl + 1;
  }
  return lines;
}

}  // namespace forge::text
