#include "forge/annotate.hpp"

#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "forge/errors.hpp"

namespace forge::annotate {

namespace {

using text::lower;

const std::map<std::string, Pos>& closed_class() {
  static const std::map<std::string, Pos> kMap = [] {
    std::map<std::string, Pos> m;
    auto add = [&m](std::initializer_list<const char*> words, Pos pos) {
      for (const char* w : words) m.emplace(w, pos);
    };
    add({"the", "a", "an", "this", "these", "those", "each", "every", "some",
         "any", "no", "all", "both", "either", "neither", "another", "such",
         "its", "his", "my", "your", "our", "their"},
        Pos::DET);
    add({"i", "you", "he", "she", "we", "they", "me", "him", "her", "us",
         "them", "it", "who", "whom", "whose", "which", "what", "something",
         "nothing", "anything", "everything", "someone", "anyone", "everyone"},
        Pos::PRON);
    add({"of", "in", "on", "at", "by", "with", "from", "to", "for", "over",
         "under", "between", "during", "towards", "toward", "through",
         "after", "before", "about", "into", "within", "along", "near",
         "across", "against", "around", "behind", "below", "beneath",
         "beside", "above", "off", "out", "up", "down", "as", "than", "per"},
        Pos::ADP);
    add({"is", "was", "are", "were", "am", "be", "been", "being", "has",
         "have", "had", "do", "does", "did", "will", "would", "can", "could",
         "shall", "should", "may", "might", "must"},
        Pos::AUX);
    add({"and", "or", "but", "nor"}, Pos::CCONJ);
    add({"because", "if", "although", "though", "while", "since", "when",
         "whether", "unless", "that", "until", "once", "whereas"},
        Pos::SCONJ);
    add({"not", "n't", "'s"}, Pos::PART);
    add({"only", "very", "also", "too", "never", "always", "often",
         "sometimes", "usually", "here", "there", "now", "then", "even",
         "still", "already", "yet", "just", "quite", "rather", "almost",
         "nearly", "more", "most", "less", "least", "well", "soon", "later",
         "early", "maybe", "perhaps", "again", "instead", "together"},
        Pos::ADV);
    add({"yes", "oh", "hey", "wow"}, Pos::INTJ);
    add({"good", "bad", "new", "old", "big", "small", "long", "short",
         "high", "low", "same", "different", "first", "last", "next",
         "previous", "second", "third", "late", "several", "many", "few",
         "other"},
        Pos::ADJ);
    add({"thing", "morning", "evening", "something"}, Pos::NOUN);
    return m;
  }();
  return kMap;
}

const std::set<std::string>& verb_stems() {
  static const std::set<std::string> kStems = {
      "release", "record",  "produce",  "sing",     "write",    "play",
      "direct",  "found",   "establish", "create",  "make",     "perform",
      "win",     "receive", "give",     "take",     "get",      "go",
      "come",    "run",     "lead",     "form",     "join",     "leave",
      "sign",    "tour",    "compose",  "arrange",  "mix",      "master",
      "engineer", "publish", "issue",   "free",     "liberate", "discharge",
      "tape",    "register", "note",    "enter",    "star",     "feature",
      "appear",  "act",     "bear",     "die",      "marry",    "graduate",
      "attend",  "serve",   "own",      "hold",     "sell",     "buy",
      "earn",    "gross",   "debut",    "peak",     "chart",    "certify",
      "nominate", "award",  "represent", "base",    "name",     "call",
      "know",    "say",     "state",    "include",  "contain",  "consist",
      "belong",  "refer",   "relate",   "describe", "depict",   "show",
      "air",     "premiere", "broadcast", "film",   "shoot",    "edit",
      "cast",    "open",    "close",    "begin",    "start",    "end",
      "finish",  "continue", "follow",  "precede",  "succeed",  "replace",
      "move",    "live",    "work",     "study",    "teach",    "learn",
      "speak",   "read",    "travel",   "visit",    "remain",   "become",
      "grow",    "rise",    "fall",     "increase", "decrease", "drop",
      "gain",    "lose",    "use",      "help",     "want",     "need",
      "try",     "ask",     "tell",     "see",      "hear",     "find",
      "think",   "believe", "mean",     "keep",     "turn",     "bring",
      "put",     "send",    "pay",      "meet",     "stand",    "sit",
      "walk",    "drive",   "fly",      "sail",     "ride",     "climb",
      "swim",    "dance",   "paint",    "draw",     "build",    "design",
      "develop", "launch",  "announce", "reveal",   "confirm",  "deny",
      "claim",   "report",  "cover",    "span",     "last"};
  return kStems;
}

const std::map<std::string, int>& simple_number_words() {
  static const std::map<std::string, int> kWords = {
      {"zero", 0},      {"one", 1},       {"two", 2},      {"three", 3},
      {"four", 4},      {"five", 5},      {"six", 6},      {"seven", 7},
      {"eight", 8},     {"nine", 9},      {"ten", 10},     {"eleven", 11},
      {"twelve", 12},   {"thirteen", 13}, {"fourteen", 14}, {"fifteen", 15},
      {"sixteen", 16},  {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
      {"twenty", 20},   {"thirty", 30},   {"forty", 40},   {"fifty", 50},
      {"sixty", 60},    {"seventy", 70},  {"eighty", 80},  {"ninety", 90}};
  return kWords;
}

// "seventy-nine" -> 79; "six" -> 6. Hyphenated tens-unit compounds only.
std::optional<int> word_group_value(const std::string& word) {
  const auto& simple = simple_number_words();
  auto it = simple.find(word);
  if (it != simple.end()) return it->second;
  std::size_t dash = word.find('-');
  if (dash == std::string::npos) return std::nullopt;
  auto tens = simple.find(word.substr(0, dash));
  auto unit = simple.find(word.substr(dash + 1));
  if (tens == simple.end() || unit == simple.end()) return std::nullopt;
  if (tens->second < 20 || tens->second % 10 != 0) return std::nullopt;
  if (unit->second < 1 || unit->second > 9) return std::nullopt;
  return tens->second + unit->second;
}

bool is_number_word(const std::string& word) {
  return word == "hundred" || word == "thousand" ||
         word_group_value(word).has_value();
}

std::optional<std::string> resolve_verb_stem(const std::string& word) {
  const auto& stems = verb_stems();
  auto in = [&stems](const std::string& s) { return stems.count(s) > 0; };
  if (in(word)) return word;
  auto undouble = [](std::string s) {
    if (s.size() >= 3 && s[s.size() - 1] == s[s.size() - 2]) s.pop_back();
    return s;
  };
  auto ends = [&word](std::string_view suf) {
    return word.size() > suf.size() &&
           word.compare(word.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("ies")) {
    std::string base = word.substr(0, word.size() - 3) + "y";
    if (in(base)) return base;
  }
  if (ends("s")) {
    std::string base = word.substr(0, word.size() - 1);
    if (in(base)) return base;
    if (ends("es") && in(word.substr(0, word.size() - 2))) {
      return word.substr(0, word.size() - 2);
    }
  }
  if (ends("ed")) {
    std::string base = word.substr(0, word.size() - 2);
    if (in(base)) return base;
    if (in(base + "e")) return base + "e";
    std::string undoubled = undouble(base);
    if (in(undoubled)) return undoubled;
    std::string minus_d = word.substr(0, word.size() - 1);
    if (in(minus_d)) return minus_d;
  }
  if (ends("ing")) {
    std::string base = word.substr(0, word.size() - 3);
    if (in(base)) return base;
    if (in(base + "e")) return base + "e";
    std::string undoubled = undouble(base);
    if (in(undoubled)) return undoubled;
  }
  return std::nullopt;
}

Pos tag_one(const std::string& token) {
  if (text::is_all_punct(token)) return Pos::PUNCT;
  if (std::isdigit(static_cast<unsigned char>(token[0])) != 0) return Pos::NUM;
  const std::string lt = lower(token);
  const auto& closed = closed_class();
  auto it = closed.find(lt);
  if (it != closed.end()) return it->second;
  if (is_number_word(lt)) return Pos::NUM;
  if (text::starts_upper(token)) return Pos::PROPN;
  if (resolve_verb_stem(lt).has_value()) return Pos::VERB;
  auto ends = [&lt](std::string_view suf) {
    return lt.size() > suf.size() &&
           lt.compare(lt.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (lt.size() >= 4 && ends("ly")) return Pos::ADV;
  if (lt.size() >= 5 && ends("ing")) return Pos::VERB;
  if (lt.size() >= 4 && ends("ed")) return Pos::VERB;
  if (lt.size() >= 5 && (ends("ous") || ends("ful") || ends("ive") ||
                         ends("able") || ends("ible") || ends("ish") ||
                         ends("less") || ends("ic"))) {
    return Pos::ADJ;
  }
  return Pos::NOUN;
}

std::vector<std::string> read_terms(const std::filesystem::path& file) {
  std::vector<std::string> terms;
  std::ifstream in(file);
  if (!in) return terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) terms.push_back(line);
  }
  return terms;
}

std::size_t phrase_tokens(std::string_view term) {
  return text::tokenize(term).size();
}

std::string phrase_key(const std::vector<std::string>& tokens,
                       std::size_t first, std::size_t count) {
  std::string key;
  for (std::size_t i = 0; i < count; ++i) {
    if (i > 0) key += ' ';
    key += lower(tokens[first + i]);
  }
  return key;
}

bool title_case(const std::string& token) {
  return text::starts_upper(token);
}

}  // namespace

std::string pos_name(Pos pos) {
  switch (pos) {
    case Pos::ADJ: return "ADJ";
    case Pos::ADP: return "ADP";
    case Pos::ADV: return "ADV";
    case Pos::AUX: return "AUX";
    case Pos::CCONJ: return "CCONJ";
    case Pos::DET: return "DET";
    case Pos::INTJ: return "INTJ";
    case Pos::NOUN: return "NOUN";
    case Pos::NUM: return "NUM";
    case Pos::PART: return "PART";
    case Pos::PRON: return "PRON";
    case Pos::PROPN: return "PROPN";
    case Pos::PUNCT: return "PUNCT";
    case Pos::SCONJ: return "SCONJ";
    case Pos::SYM: return "SYM";
    case Pos::VERB: return "VERB";
    case Pos::X: return "X";
  }
  return "X";
}

Pos parse_pos(std::string_view s) {
  static const std::map<std::string, Pos, std::less<>> kByName = {
      {"ADJ", Pos::ADJ},     {"ADP", Pos::ADP},   {"ADV", Pos::ADV},
      {"AUX", Pos::AUX},     {"CCONJ", Pos::CCONJ}, {"DET", Pos::DET},
      {"INTJ", Pos::INTJ},   {"NOUN", Pos::NOUN}, {"NUM", Pos::NUM},
      {"PART", Pos::PART},   {"PRON", Pos::PRON}, {"PROPN", Pos::PROPN},
      {"PUNCT", Pos::PUNCT}, {"SCONJ", Pos::SCONJ}, {"SYM", Pos::SYM},
      {"VERB", Pos::VERB},   {"X", Pos::X}};
  auto it = kByName.find(s);
  if (it == kByName.end()) {
    throw ValidationError("unknown POS tag '" + std::string(s) + "'");
  }
  return it->second;
}

std::string entity_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::None: return "None";
    case EntityKind::PersonName: return "PersonName";
    case EntityKind::City: return "City";
    case EntityKind::Country: return "Country";
    case EntityKind::Nationality: return "Nationality";
    case EntityKind::Number: return "Number";
    case EntityKind::Date: return "Date";
  }
  return "None";
}

std::vector<TokenAnnotation> pos_tag(const std::vector<std::string>& tokens) {
  std::vector<TokenAnnotation> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) {
    out.push_back(TokenAnnotation{t, tag_one(t), EntityKind::None});
  }
  return out;
}

std::vector<TokenAnnotation> apply_pos_override(
    const std::vector<std::string>& tokens, std::string_view override_file) {
  std::vector<std::pair<std::string, Pos>> rows;
  for (const std::string& line : text::split_lines(override_file)) {
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("POS override line '" + line + "': expected TAB");
    }
    rows.emplace_back(line.substr(0, tab), parse_pos(line.substr(tab + 1)));
  }
  if (rows.size() != tokens.size()) {
    throw ValidationError(
        "POS override length mismatch: " + std::to_string(rows.size()) +
        " rows for " + std::to_string(tokens.size()) + " tokens");
  }
  std::vector<TokenAnnotation> out;
  out.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (rows[i].first != tokens[i]) {
      throw ValidationError("POS override token mismatch at position " +
                            std::to_string(i) + ": '" + rows[i].first +
                            "' vs '" + tokens[i] + "'");
    }
    out.push_back(TokenAnnotation{tokens[i], rows[i].second, EntityKind::None});
  }
  return out;
}

void Gazetteer::add_city(std::string_view term) {
  if (cities.insert(lower(term)).second) city_list.emplace_back(term);
  max_phrase_tokens = std::max(max_phrase_tokens, phrase_tokens(term));
}

void Gazetteer::add_country(std::string_view term) {
  if (countries.insert(lower(term)).second) country_list.emplace_back(term);
  max_phrase_tokens = std::max(max_phrase_tokens, phrase_tokens(term));
}

void Gazetteer::add_nationality(std::string_view term) {
  if (nationalities.insert(lower(term)).second) {
    nationality_list.emplace_back(term);
  }
  max_phrase_tokens = std::max(max_phrase_tokens, phrase_tokens(term));
}

void Gazetteer::add_first_name(std::string_view term) {
  first_names.insert(lower(term));
}

void Gazetteer::add_last_name(std::string_view term) {
  last_names.insert(lower(term));
}

void Gazetteer::add_replacement(std::string_view term,
                                std::string_view replacement) {
  replacement_map[lower(term)] = std::string(replacement);
}

Gazetteer Gazetteer::load_dir(const std::filesystem::path& dir) {
  Gazetteer g;
  for (const std::string& t : read_terms(dir / "cities.txt")) g.add_city(t);
  for (const std::string& t : read_terms(dir / "countries.txt")) g.add_country(t);
  for (const std::string& t : read_terms(dir / "nationalities.txt")) {
    g.add_nationality(t);
  }
  for (const std::string& t : read_terms(dir / "first_names.txt")) {
    g.add_first_name(t);
  }
  for (const std::string& t : read_terms(dir / "last_names.txt")) {
    g.add_last_name(t);
  }
  for (const std::string& line : read_terms(dir / "replacement_map.tsv")) {
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("replacement_map.tsv line '" + line + "': expected TAB");
    }
    g.add_replacement(line.substr(0, tab), line.substr(tab + 1));
  }
  return g;
}

std::vector<EntitySpan> find_entity_spans(const std::vector<std::string>& tokens,
                                          const Gazetteer& gazetteer) {
  std::vector<EntitySpan> spans;
  const std::size_t n = tokens.size();
  std::size_t i = 0;
  while (i < n) {
    bool matched = false;
    const std::size_t max_len = std::min(gazetteer.max_phrase_tokens, n - i);
    for (std::size_t len = std::max<std::size_t>(max_len, 2); len >= 1 && !matched;
         --len) {
      if (i + len > n) continue;
      if (len == 2 && title_case(tokens[i]) && title_case(tokens[i + 1]) &&
          gazetteer.first_names.count(lower(tokens[i])) > 0 &&
          gazetteer.last_names.count(lower(tokens[i + 1])) > 0) {
        spans.push_back(EntitySpan{i, i + 2, EntityKind::PersonName});
        matched = true;
        break;
      }
      const std::string key = phrase_key(tokens, i, len);
      EntityKind kind = EntityKind::None;
      if (gazetteer.cities.count(key) > 0) {
        kind = EntityKind::City;
      } else if (gazetteer.countries.count(key) > 0) {
        kind = EntityKind::Country;
      } else if (gazetteer.nationalities.count(key) > 0) {
        kind = EntityKind::Nationality;
      }
      if (kind != EntityKind::None) {
        spans.push_back(EntitySpan{i, i + len, kind});
        matched = true;
      }
    }
    if (matched) {
      i = spans.back().end;
      continue;
    }
    if (text::is_all_digits(tokens[i])) {
      spans.push_back(EntitySpan{i, i + 1, EntityKind::Number});
    }
    ++i;
  }
  return spans;
}

std::vector<TokenAnnotation> find_entities(const std::vector<std::string>& tokens,
                                           const Gazetteer& gazetteer) {
  std::vector<TokenAnnotation> out = pos_tag(tokens);
  for (const EntitySpan& span : find_entity_spans(tokens, gazetteer)) {
    for (std::size_t i = span.first; i < span.end; ++i) {
      out[i].entity = span.kind;
    }
  }
  return out;
}

std::string number_to_words(long long n) {
  if (n < 0 || n > 9999) {
    throw ConversionError("number " + std::to_string(n) +
                          " outside supported range 0..9999");
  }
  if (n == 0) return "zero";
  static const std::array<const char*, 20> kSmall = {
      "zero",    "one",     "two",       "three",    "four",
      "five",    "six",     "seven",     "eight",    "nine",
      "ten",     "eleven",  "twelve",    "thirteen", "fourteen",
      "fifteen", "sixteen", "seventeen", "eighteen", "nineteen"};
  static const std::array<const char*, 10> kTens = {
      "",      "",      "twenty", "thirty", "forty",
      "fifty", "sixty", "seventy", "eighty", "ninety"};
  std::vector<std::string> parts;
  if (n >= 1000) {
    parts.push_back(std::string(kSmall[n / 1000]) + " thousand");
    n %= 1000;
  }
  if (n >= 100) {
    parts.push_back(std::string(kSmall[n / 100]) + " hundred");
    n %= 100;
  }
  if (n >= 20) {
    std::string tail = kTens[n / 10];
    if (n % 10 != 0) tail += std::string("-") + kSmall[n % 10];
    parts.push_back(tail);
  } else if (n > 0) {
    parts.push_back(kSmall[n]);
  }
  return text::join(parts, " ");
}

std::optional<long long> try_parse_number_words(std::string_view s) {
  std::istringstream in{lower(s)};
  std::vector<std::string> items;
  std::string item;
  while (in >> item) {
    if (item != "and") items.push_back(item);
  }
  if (items.empty()) return std::nullopt;
  // Year reading: two tens-scale groups side by side ("nineteen seventy-nine").
  if (items.size() == 2) {
    auto a = word_group_value(items[0]);
    auto b = word_group_value(items[1]);
    if (a && b && *a >= 10 && *a <= 99 && *b >= 10 && *b <= 99) {
      return static_cast<long long>(*a) * 100 + *b;
    }
  }
  long long total = 0;
  long long acc = 0;
  bool any_value = false;
  for (const std::string& w : items) {
    if (w == "hundred") {
      if (!any_value) return std::nullopt;
      acc = (acc == 0 ? 1 : acc) * 100;
    } else if (w == "thousand") {
      if (!any_value) return std::nullopt;
      total += (acc == 0 ? 1 : acc) * 1000;
      acc = 0;
    } else {
      auto v = word_group_value(w);
      if (!v) return std::nullopt;
      acc += *v;
      any_value = true;
    }
  }
  total += acc;
  if (total < 0 || total > 9999) return std::nullopt;
  return total;
}

std::string normalize_numeral(std::string_view s, NumeralDirection direction) {
  std::string_view trimmed = s;
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(
                                 trimmed.front())) != 0) {
    trimmed.remove_prefix(1);
  }
  while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(
                                 trimmed.back())) != 0) {
    trimmed.remove_suffix(1);
  }
  if (trimmed.empty()) throw ConversionError("empty numeral");
  const bool digits = text::is_all_digits(trimmed);
  if (direction == NumeralDirection::to_digits) {
    if (digits) return std::string(trimmed);
    auto value = try_parse_number_words(trimmed);
    if (!value) {
      throw ConversionError("cannot read '" + std::string(trimmed) +
                            "' as a number word");
    }
    return std::to_string(*value);
  }
  if (digits) {
    if (trimmed.size() > 4) {
      throw ConversionError("number '" + std::string(trimmed) +
                            "' outside supported range 0..9999");
    }
    return number_to_words(std::stoll(std::string(trimmed)));
  }
  if (try_parse_number_words(trimmed).has_value()) return std::string(trimmed);
  throw ConversionError("cannot read '" + std::string(trimmed) +
                        "' as a number word");
}

bool is_month_word(std::string_view token) {
  static const std::set<std::string> kMonths = {
      "january", "february", "march",    "april",   "may",      "june",
      "july",    "august",   "september", "october", "november", "december",
      "jan",     "feb",      "mar",      "apr",     "jun",      "jul",
      "aug",     "sep",      "sept",     "oct",     "nov",      "dec"};
  return kMonths.count(lower(token)) > 0;
}

std::string verb_lemma(std::string_view word) {
  const std::string lw = lower(word);
  if (auto stem = resolve_verb_stem(lw)) return *stem;
  auto ends = [&lw](std::string_view suf) {
    return lw.size() > suf.size() + 1 &&
           lw.compare(lw.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("ies")) return lw.substr(0, lw.size() - 3) + "y";
  if (ends("ing")) return lw.substr(0, lw.size() - 3);
  if (ends("ed")) return lw.substr(0, lw.size() - 2);
  if (ends("s") && !ends("ss")) return lw.substr(0, lw.size() - 1);
  return lw;
}

bool is_auxiliary(std::string_view word) {
  static const std::set<std::string> kAux = {
      "is",   "was",  "are",   "were",  "am",    "be",   "been",
      "being", "has", "have",  "had",   "do",    "does", "did",
      "will", "would", "can",  "could", "shall", "should", "may",
      "might", "must"};
  return kAux.count(lower(word)) > 0;
}

SynonymLexicon SynonymLexicon::load(std::string_view tsv) {
  SynonymLexicon lex;
  const std::vector<std::string> lines = text::split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("synonym lexicon line " + std::to_string(i + 1) +
                       ": expected TAB");
    }
    const std::string word = lower(line.substr(0, tab));
    if (word.empty()) {
      throw ParseError("synonym lexicon line " + std::to_string(i + 1) +
                       ": empty word");
    }
    std::string rest = line.substr(tab + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      std::size_t comma = rest.find(',', pos);
      std::string syn = comma == std::string::npos
                            ? rest.substr(pos)
                            : rest.substr(pos, comma - pos);
      while (!syn.empty() && syn.front() == ' ') syn.erase(syn.begin());
      while (!syn.empty() && syn.back() == ' ') syn.pop_back();
      if (!syn.empty()) {
        const std::string ls = lower(syn);
        lex.entries_[word].insert(ls);
        lex.entries_[ls].insert(word);
      }
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return lex;
}

SynonymLexicon SynonymLexicon::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open synonym lexicon '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

std::set<std::string> SynonymLexicon::synonyms(std::string_view word) const {
  if (word.empty()) throw ConversionError("empty word for synonym lookup");
  const std::string lw = lower(word);
  std::set<std::string> out;
  auto it = entries_.find(lw);
  if (it != entries_.end()) out = it->second;
  out.insert(lw);
  return out;
}

}  // namespace forge::annotate
