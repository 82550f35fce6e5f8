#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/text.hpp"

namespace forge::annotate {

enum class Pos {
  ADJ, ADP, ADV, AUX, CCONJ, DET, INTJ, NOUN, NUM, PART, PRON, PROPN,
  PUNCT, SCONJ, SYM, VERB, X
};

std::string pos_name(Pos pos);
Pos parse_pos(std::string_view s);

enum class EntityKind { None, PersonName, City, Country, Nationality, Number, Date };

std::string entity_name(EntityKind kind);

struct TokenAnnotation {
  std::string token;
  Pos pos = Pos::X;
  EntityKind entity = EntityKind::None;

  bool operator==(const TokenAnnotation&) const = default;
};

// Deterministic lexicon + suffix tagger. Every token receives a tag:
// digit-initial tokens are NUM, punctuation-only tokens PUNCT, closed-class
// words come from a built-in lexicon, unknown capitalized words are PROPN,
// known verb stems (with -s/-ed/-ing inflection) are VERB, suffix heuristics
// cover derived adjectives/adverbs/nouns, and anything left is NOUN.
std::vector<TokenAnnotation> pos_tag(const std::vector<std::string>& tokens);

// CoNLL-style override: two tab-separated columns, token and tag, one line
// per token. Must align with `tokens` in length and surface form.
std::vector<TokenAnnotation> apply_pos_override(
    const std::vector<std::string>& tokens, std::string_view override_file);

struct Gazetteer {
  // Lookup sets are lowercased; display lists keep file casing for
  // deterministic fallback replacements.
  std::set<std::string> cities, countries, nationalities;
  std::set<std::string> first_names, last_names;
  std::vector<std::string> city_list, country_list, nationality_list;
  std::map<std::string, std::string> replacement_map;  // lowercased key
  std::size_t max_phrase_tokens = 1;

  // Reads cities.txt, countries.txt, nationalities.txt, first_names.txt,
  // last_names.txt (one term per line) and replacement_map.tsv
  // (term<TAB>replacement). Missing files load as empty.
  static Gazetteer load_dir(const std::filesystem::path& dir);

  void add_city(std::string_view term);
  void add_country(std::string_view term);
  void add_nationality(std::string_view term);
  void add_first_name(std::string_view term);
  void add_last_name(std::string_view term);
  void add_replacement(std::string_view term, std::string_view replacement);
};

// Half-open token range [first, end).
struct EntitySpan {
  std::size_t first = 0;
  std::size_t end = 0;
  EntityKind kind = EntityKind::None;

  bool operator==(const EntitySpan&) const = default;
};

// Greedy longest-match scan, left to right, so spans never overlap.
// Title-case bigrams matching the first+last name lists become PersonName;
// gazetteer phrases become City/Country/Nationality; all-digit tokens
// become Number.
std::vector<EntitySpan> find_entity_spans(const std::vector<std::string>& tokens,
                                          const Gazetteer& gazetteer);

// Per-token view of the same scan, with POS filled by the built-in tagger.
std::vector<TokenAnnotation> find_entities(const std::vector<std::string>& tokens,
                                           const Gazetteer& gazetteer);

enum class NumeralDirection { to_digits, to_words };

// English numerals, 0..9999 (plus two-group year forms such as
// "nineteen seventy-nine" on the parsing side). Idempotent when the input is
// already in the target form. Unparseable input raises ConversionError.
std::string normalize_numeral(std::string_view s, NumeralDirection direction);

std::string number_to_words(long long n);
std::optional<long long> try_parse_number_words(std::string_view s);

bool is_month_word(std::string_view token);

// Best-effort verb lemma: resolves inflected forms against the built-in verb
// stem list, falling back to deterministic suffix stripping.
std::string verb_lemma(std::string_view word);

bool is_auxiliary(std::string_view word);

class SynonymLexicon {
 public:
  SynonymLexicon() = default;

  // TSV lines: word<TAB>syn1,syn2,... Loaded lowercased; symmetry is
  // enforced at load time (a in syn(b) implies b in syn(a)).
  static SynonymLexicon load(std::string_view tsv);
  static SynonymLexicon load_file(const std::filesystem::path& path);

  // Lowercase synonym set including the word itself; just the word when the
  // lexicon has no entry. Empty input raises ConversionError.
  std::set<std::string> synonyms(std::string_view word) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, std::set<std::string>> entries_;
};

}  // namespace forge::annotate
