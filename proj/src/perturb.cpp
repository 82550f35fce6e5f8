#include "forge/perturb.hpp"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>
#include <set>

#include "forge/errors.hpp"
#include "forge/jsonio.hpp"
#include "forge/rng.hpp"
#include "forge/text.hpp"

namespace forge::perturb {

namespace {

bool is_alpha_word(std::string_view s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (!std::isalpha(c)) return false;
  }
  return true;
}

// Token indices covered by entity or number spans; character edits and
// name/location lookups must not collide with them.
std::vector<bool> entity_cover(const std::vector<std::string>& token_strings,
                               const annotate::Gazetteer& gazetteer) {
  std::vector<bool> covered(token_strings.size(), false);
  for (const annotate::EntitySpan& span :
       annotate::find_entity_spans(token_strings, gazetteer)) {
    for (std::size_t i = span.first; i < span.end; ++i) covered[i] = true;
  }
  return covered;
}

// Applies replacements right to left so recorded byte offsets stay valid.
std::string splice(std::string_view original,
                   std::vector<Replacement> replacements) {
  std::sort(replacements.begin(), replacements.end(),
            [](const Replacement& a, const Replacement& b) {
              return a.begin > b.begin;
            });
  std::string out(original);
  for (const Replacement& r : replacements) {
    out.replace(r.begin, r.end - r.begin, r.replacement);
  }
  return out;
}

std::string surface_of(std::string_view s, std::size_t begin, std::size_t end) {
  return std::string(s.substr(begin, end - begin));
}

long long digits_value(std::string_view s) {
  long long v = 0;
  for (char c : s) {
    v = v * 10 + (c - '0');
    if (v > 1000000000LL) return v;  // caller only needs small-value checks
  }
  return v;
}

}  // namespace

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::Character: return "character";
    case Kind::Location: return "location";
    case Kind::Name: return "name";
    case Kind::Number: return "number";
    case Kind::Negation: return "negation";
    case Kind::Paraphrase: return "paraphrase";
  }
  return "unknown";
}

Kind parse_kind(std::string_view s) {
  if (s == "character") return Kind::Character;
  if (s == "location") return Kind::Location;
  if (s == "name") return Kind::Name;
  if (s == "number") return Kind::Number;
  if (s == "negation") return Kind::Negation;
  if (s == "paraphrase") return Kind::Paraphrase;
  throw ValidationError("unknown perturbation kind '" + std::string(s) + "'");
}

OpResult perturb_character(std::string_view text, std::uint64_t seed,
                           int n_ops, const annotate::Gazetteer& gazetteer) {
  if (n_ops < 1) throw ValidationError("perturb_character: n_ops must be >= 1");
  const std::vector<text::Token> tokens = text::tokenize(text);
  const std::vector<bool> covered =
      entity_cover(text::token_texts(tokens), gazetteer);
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!covered[i] && tokens[i].text.size() >= 3 &&
        is_alpha_word(tokens[i].text)) {
      eligible.push_back(i);
    }
  }
  if (eligible.empty()) {
    throw NoOpError("no word of length >= 3 outside entity spans");
  }
  Rng rng(seed);
  // Edits accumulate on per-token strings; spans into the original text stay
  // fixed until the final splice.
  std::map<std::size_t, std::string> edited;
  for (int op = 0; op < n_ops; ++op) {
    const std::size_t idx = eligible[rng.index(eligible.size())];
    std::string& word = edited.try_emplace(idx, tokens[idx].text).first->second;
    const std::size_t len = word.size();
    enum EditOp { Insert, Swap, Delete, Substitute };
    std::vector<EditOp> feasible = {Insert};
    if (len >= 3) {
      feasible.push_back(Delete);
      feasible.push_back(Substitute);
    }
    bool swap_ok = false;
    if (len >= 4) {
      for (std::size_t i = 1; i + 1 <= len - 2; ++i) {
        if (word[i] != word[i + 1]) swap_ok = true;
      }
    }
    if (swap_ok) feasible.push_back(Swap);
    switch (feasible[rng.index(feasible.size())]) {
      case Insert: {
        const std::size_t pos = 1 + rng.index(len - 1);
        word.insert(word.begin() + static_cast<std::ptrdiff_t>(pos),
                    static_cast<char>('a' + rng.index(26)));
        break;
      }
      case Swap: {
        std::size_t i;
        do {
          i = 1 + rng.index(len - 3);
        } while (word[i] == word[i + 1]);
        std::swap(word[i], word[i + 1]);
        break;
      }
      case Delete: {
        const std::size_t pos = 1 + rng.index(len - 2);
        word.erase(word.begin() + static_cast<std::ptrdiff_t>(pos));
        break;
      }
      case Substitute: {
        const std::size_t pos = 1 + rng.index(len - 2);
        char c;
        do {
          c = static_cast<char>('a' + rng.index(26));
        } while (c == word[pos]);
        word[pos] = c;
        break;
      }
    }
  }
  OpResult result;
  result.trace.kind = Kind::Character;
  for (const auto& [idx, word] : edited) {
    result.trace.replacements.push_back(
        {tokens[idx].begin, tokens[idx].end, tokens[idx].text, word});
  }
  result.text = splice(text, result.trace.replacements);
  return result;
}

OpResult perturb_location(std::string_view text,
                          const annotate::Gazetteer& gazetteer) {
  const std::vector<text::Token> tokens = text::tokenize(text);
  const std::vector<std::string> token_strings = text::token_texts(tokens);
  OpResult result;
  result.trace.kind = Kind::Location;
  for (const annotate::EntitySpan& span :
       annotate::find_entity_spans(token_strings, gazetteer)) {
    const std::vector<std::string>* pool = nullptr;
    switch (span.kind) {
      case annotate::EntityKind::City: pool = &gazetteer.city_list; break;
      case annotate::EntityKind::Country: pool = &gazetteer.country_list; break;
      case annotate::EntityKind::Nationality:
        pool = &gazetteer.nationality_list;
        break;
      default: continue;
    }
    const std::size_t begin = tokens[span.first].begin;
    const std::size_t end = tokens[span.end - 1].end;
    const std::string surface = surface_of(text, begin, end);
    const std::string key = text::lower(surface);
    std::string replacement;
    if (auto it = gazetteer.replacement_map.find(key);
        it != gazetteer.replacement_map.end()) {
      replacement = it->second;
    } else {
      for (const std::string& candidate : *pool) {
        if (text::lower(candidate) != key) {
          replacement = candidate;
          break;
        }
      }
    }
    if (replacement.empty()) continue;
    result.trace.replacements.push_back({begin, end, surface, replacement});
  }
  if (result.trace.replacements.empty()) {
    throw NoOpError("no replaceable location span");
  }
  result.text = splice(text, result.trace.replacements);
  return result;
}

OpResult perturb_name(std::string_view text,
                      const std::vector<std::string>& name_list,
                      std::uint64_t seed, const annotate::Gazetteer& gazetteer) {
  if (name_list.empty()) {
    throw ValidationError("perturb_name: empty name list");
  }
  const std::vector<text::Token> tokens = text::tokenize(text);
  const std::vector<std::string> token_strings = text::token_texts(tokens);
  Rng rng(seed);
  OpResult result;
  result.trace.kind = Kind::Name;
  for (const annotate::EntitySpan& span :
       annotate::find_entity_spans(token_strings, gazetteer)) {
    if (span.kind != annotate::EntityKind::PersonName) continue;
    const std::size_t begin = tokens[span.first].begin;
    const std::size_t end = tokens[span.end - 1].end;
    const std::string surface = surface_of(text, begin, end);
    const std::string key = text::lower(surface);
    std::string replacement;
    for (std::size_t attempt = 0; attempt < name_list.size() * 4 + 4;
         ++attempt) {
      const std::string& candidate = name_list[rng.index(name_list.size())];
      if (text::lower(candidate) != key) {
        replacement = candidate;
        break;
      }
    }
    if (replacement.empty()) continue;
    result.trace.replacements.push_back({begin, end, surface, replacement});
  }
  if (result.trace.replacements.empty()) {
    throw NoOpError("no replaceable person name");
  }
  result.text = splice(text, result.trace.replacements);
  return result;
}

OpResult perturb_number(std::string_view text, std::uint64_t seed) {
  const std::vector<text::Token> tokens = text::tokenize(text);
  std::vector<std::size_t> numbers;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (text::is_all_digits(tokens[i].text)) numbers.push_back(i);
  }
  if (numbers.empty()) throw NoOpError("no digit token");
  Rng rng(seed);
  const std::size_t idx = numbers[rng.index(numbers.size())];
  const long long value = digits_value(tokens[idx].text);
  const bool month_neighbor =
      (idx > 0 && annotate::is_month_word(text::lower(tokens[idx - 1].text))) ||
      (idx + 1 < tokens.size() &&
       annotate::is_month_word(text::lower(tokens[idx + 1].text)));
  const long long hi = (month_neighbor && value <= 31) ? 28 : 3999;
  long long fresh;
  do {
    fresh = rng.integer(1, hi);
  } while (fresh == value);
  OpResult result;
  result.trace.kind = Kind::Number;
  result.trace.replacements.push_back({tokens[idx].begin, tokens[idx].end,
                                       tokens[idx].text,
                                       std::to_string(fresh)});
  result.text = splice(text, result.trace.replacements);
  return result;
}

OpResult perturb_negation(std::string_view text) {
  const std::vector<text::Token> tokens = text::tokenize(text);
  const std::vector<std::string> token_strings = text::token_texts(tokens);
  for (const std::string& t : token_strings) {
    const std::string folded = text::lower(t);
    if (folded == "not" || folded == "n't") {
      throw NoOpError("already negated");
    }
  }
  const std::vector<annotate::TokenAnnotation> annotations =
      annotate::pos_tag(token_strings);
  OpResult result;
  result.trace.kind = Kind::Negation;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!annotate::is_auxiliary(text::lower(tokens[i].text))) continue;
    // Mid-sentence capitalized "May" is the month, not the modal.
    if (i > 0 && text::starts_upper(tokens[i].text)) continue;
    result.trace.replacements.push_back(
        {tokens[i].begin, tokens[i].end, tokens[i].text,
         tokens[i].text + " not"});
    result.text = splice(text, result.trace.replacements);
    return result;
  }
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (annotations[i].pos != annotate::Pos::VERB) continue;
    const std::string surface = tokens[i].text;
    const std::string folded = text::lower(surface);
    const std::string lemma = annotate::verb_lemma(folded);
    std::string phrase;
    if (folded == lemma) {
      phrase = "do not " + lemma;
    } else if (!folded.empty() && folded.back() == 's') {
      phrase = "does not " + lemma;
    } else {
      phrase = "did not " + lemma;
    }
    result.trace.replacements.push_back(
        {tokens[i].begin, tokens[i].end, surface, phrase});
    result.text = splice(text, result.trace.replacements);
    return result;
  }
  throw NoOpError("no negatable site");
}

FileMapParaphraser FileMapParaphraser::load(std::string_view tsv) {
  FileMapParaphraser out;
  std::size_t row = 0;
  for (std::string_view line : text::split_lines(tsv)) {
    ++row;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("paraphrase map row " + std::to_string(row) +
                       ": expected hyp_id<TAB>paraphrase");
    }
    const std::string hyp_id(line.substr(0, tab));
    const std::string paraphrase(line.substr(tab + 1));
    if (hyp_id.empty() || paraphrase.empty()) {
      throw ParseError("paraphrase map row " + std::to_string(row) +
                       ": empty field");
    }
    if (!out.map_.emplace(hyp_id, paraphrase).second) {
      throw ValidationError("paraphrase map: duplicate hyp_id '" + hyp_id +
                            "'");
    }
  }
  return out;
}

FileMapParaphraser FileMapParaphraser::load_file(
    const std::filesystem::path& path) {
  return load(jsonio::read_file(path));
}

std::optional<std::string> FileMapParaphraser::paraphrase(
    std::string_view hyp_id, std::string_view) const {
  auto it = map_.find(hyp_id);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> FrontingParaphraser::paraphrase(
    std::string_view, std::string_view current) const {
  static const std::set<std::string> kFrontable = {"in", "on", "at", "during",
                                                   "towards"};
  const std::vector<text::Token> tokens = text::tokenize(current);
  if (tokens.empty()) return std::nullopt;
  const std::vector<std::string> token_strings = text::token_texts(tokens);
  const std::vector<annotate::TokenAnnotation> annotations =
      annotate::pos_tag(token_strings);
  std::size_t verb = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (annotations[i].pos == annotate::Pos::VERB ||
        annotations[i].pos == annotate::Pos::AUX) {
      verb = i;
      break;
    }
  }
  if (verb == tokens.size()) return std::nullopt;
  std::size_t prep = tokens.size();
  for (std::size_t i = verb + 1; i < tokens.size(); ++i) {
    if (kFrontable.count(text::lower(tokens[i].text))) {
      prep = i;
      break;
    }
  }
  if (prep == tokens.size() || prep + 1 == tokens.size()) return std::nullopt;
  std::string phrase(current.substr(tokens[prep].begin));
  std::string head(current.substr(0, tokens[prep].begin));
  while (!phrase.empty() && (phrase.back() == '.' || phrase.back() == ' ')) {
    phrase.pop_back();
  }
  while (!head.empty() && head.back() == ' ') head.pop_back();
  if (phrase.empty() || head.empty()) return std::nullopt;
  if (annotations[0].pos != annotate::Pos::PROPN) {
    head = text::decapitalize_first(head);
  }
  return text::capitalize_first(phrase) + ", " + head + ".";
}

std::optional<corpus::Label> transition_label(corpus::Label label, Kind kind,
                                              const TransitionRule& rules) {
  using corpus::Label;
  switch (kind) {
    case Kind::Character:
    case Kind::Paraphrase:
      return label;
    case Kind::Location:
    case Kind::Number:
      return label == Label::E ? Label::C : label;
    case Kind::Name:
      return Label::N;
    case Kind::Negation:
      switch (label) {
        case Label::E: return Label::C;
        case Label::N: return Label::N;
        case Label::C:
          if (rules.negation_c_to_e) return Label::E;
          return std::nullopt;
      }
  }
  return label;
}

PerturbationRecord compose(const corpus::Pair& pair,
                           const std::vector<Kind>& kinds, std::uint64_t seed,
                           const Providers& providers) {
  if (kinds.empty()) throw ValidationError("compose: no perturbation kinds");
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    for (std::size_t j = i + 1; j < kinds.size(); ++j) {
      if (kinds[i] == kinds[j]) {
        throw ValidationError("compose: duplicate kind '" +
                              kind_name(kinds[i]) + "'");
      }
    }
  }
  auto need_gazetteer = [&providers](Kind kind) {
    if (providers.gazetteer == nullptr) {
      throw ValidationError("compose: kind '" + kind_name(kind) +
                            "' needs a gazetteer");
    }
  };
  PerturbationRecord record;
  record.pair_ref = corpus::pair_ref(pair);
  record.original_text = pair.hypothesis.text;
  record.original_label = pair.hypothesis.label;
  record.seed = seed;
  std::string current = pair.hypothesis.text;
  corpus::Label label = pair.hypothesis.label;
  // Earlier surface substitutions, re-applied onto paraphrases that were
  // precomputed against the original hypothesis.
  std::vector<std::pair<std::string, std::string>> applied;
  for (Kind kind : kinds) {
    OpResult step;
    try {
      switch (kind) {
        case Kind::Character:
          need_gazetteer(kind);
          step = perturb_character(current, Rng::mix(seed, "character"),
                                   providers.character_ops,
                                   *providers.gazetteer);
          break;
        case Kind::Location:
          need_gazetteer(kind);
          step = perturb_location(current, *providers.gazetteer);
          break;
        case Kind::Name:
          need_gazetteer(kind);
          step = perturb_name(current, providers.name_list,
                              Rng::mix(seed, "name"), *providers.gazetteer);
          break;
        case Kind::Number:
          step = perturb_number(current, Rng::mix(seed, "number"));
          break;
        case Kind::Negation:
          step = perturb_negation(current);
          break;
        case Kind::Paraphrase: {
          if (providers.paraphraser == nullptr) {
            throw ValidationError("compose: no paraphrase provider");
          }
          std::optional<std::string> mapped = providers.paraphraser->paraphrase(
              pair.hypothesis.hyp_id, current);
          if (!mapped.has_value()) {
            throw NoOpError("provider '" + providers.paraphraser->name() +
                            "' has no paraphrase");
          }
          if (providers.paraphraser->keyed_on_original()) {
            for (const auto& [original, replacement] : applied) {
              std::size_t at = 0;
              while ((at = mapped->find(original, at)) != std::string::npos) {
                mapped->replace(at, original.size(), replacement);
                at += replacement.size();
              }
            }
          }
          step.trace.kind = Kind::Paraphrase;
          step.trace.no_op = *mapped == current;
          step.trace.replacements.push_back(
              {0, current.size(), current, *mapped});
          step.text = *mapped;
          break;
        }
      }
    } catch (const NoOpError& e) {
      record.dropped = true;
      record.drop_reason = kind_name(kind) + ": " + e.what();
      record.perturbed_text = current;
      return record;
    }
    const std::optional<corpus::Label> next =
        transition_label(label, kind, providers.rules);
    record.ops.push_back(step.trace);
    current = step.text;
    if (!next.has_value()) {
      record.dropped = true;
      record.drop_reason = kind_name(kind) + ": label transition drops " +
                           corpus::label_name(label);
      record.perturbed_text = current;
      return record;
    }
    label = *next;
    if (kind != Kind::Paraphrase) {
      for (const Replacement& r : step.trace.replacements) {
        applied.emplace_back(r.original, r.replacement);
      }
    }
  }
  bool all_no_op = true;
  for (const OpTrace& trace : record.ops) {
    if (!trace.no_op) all_no_op = false;
  }
  if (all_no_op) {
    record.dropped = true;
    record.drop_reason = "every op was a no-op";
    record.perturbed_text = current;
    return record;
  }
  record.perturbed_text = current;
  record.new_label = label;
  return record;
}

std::string record_to_json(const PerturbationRecord& record) {
  nlohmann::ordered_json doc;
  doc["pair_ref"] = record.pair_ref;
  doc["original_text"] = record.original_text;
  doc["perturbed_text"] = record.perturbed_text;
  nlohmann::ordered_json ops = nlohmann::ordered_json::array();
  for (const OpTrace& trace : record.ops) {
    nlohmann::ordered_json op;
    op["kind"] = kind_name(trace.kind);
    nlohmann::ordered_json replacements = nlohmann::ordered_json::array();
    for (const Replacement& r : trace.replacements) {
      replacements.push_back({{"begin", r.begin},
                              {"end", r.end},
                              {"original", r.original},
                              {"replacement", r.replacement}});
    }
    op["replacements"] = std::move(replacements);
    op["no_op"] = trace.no_op;
    ops.push_back(std::move(op));
  }
  doc["ops"] = std::move(ops);
  doc["original_label"] = corpus::label_name(record.original_label);
  doc["new_label"] = record.new_label.has_value()
                         ? corpus::label_name(*record.new_label)
                         : "Dropped";
  doc["seed"] = record.seed;
  if (record.dropped) doc["drop_reason"] = record.drop_reason;
  return doc.dump();
}

}  // namespace forge::perturb
