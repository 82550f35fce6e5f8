#include "forge/probe.hpp"

#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/pet.hpp"
#include "forge/rng.hpp"
#include "forge/text.hpp"

namespace forge::probe {

namespace {

struct Span {
  std::size_t begin = 0;  // byte offsets into the hypothesis text
  std::size_t end = 0;
};

// Adds the numeral spelling in the opposite direction when `surface` is a
// plain number within the converter's range.
void add_numeral_alternates(std::set<std::string>& gold,
                            const std::string& surface) {
  if (text::is_all_digits(surface)) {
    long long value = 0;
    for (char c : surface) value = value * 10 + (c - '0');
    if (value <= 9999) gold.insert(annotate::number_to_words(value));
    return;
  }
  if (auto value = annotate::try_parse_number_words(surface)) {
    gold.insert(std::to_string(*value));
  }
}

std::string splice_mask(std::string_view hyp_text, const Span& span) {
  std::string out;
  out.reserve(hyp_text.size() + pet::kMaskToken.size());
  out.append(hyp_text.substr(0, span.begin));
  out.append(pet::kMaskToken);
  out.append(hyp_text.substr(span.end));
  return out;
}

std::vector<Prompt> emit(const corpus::Pair& pair, KnowledgeType type,
                         const std::vector<Span>& spans,
                         const std::vector<std::set<std::string>>& golds,
                         std::uint64_t seed, bool all_spans) {
  std::vector<std::size_t> chosen;
  if (all_spans) {
    for (std::size_t i = 0; i < spans.size(); ++i) chosen.push_back(i);
  } else if (!spans.empty()) {
    Rng rng(Rng::mix(seed, corpus::pair_ref(pair), knowledge_type_name(type)));
    chosen.push_back(rng.index(spans.size()));
  }
  std::vector<Prompt> out;
  for (std::size_t i : chosen) {
    Prompt p;
    p.id = knowledge_type_name(type) + ":" + corpus::pair_ref(pair) + ":" +
           std::to_string(i);
    p.text_with_mask = splice_mask(pair.hypothesis.text, spans[i]);
    p.gold_surfaces = golds[i];
    p.knowledge_type = type;
    p.source_label = pair.hypothesis.label;
    p.table_id = pair.table.table_id;
    p.hyp_id = pair.hypothesis.hyp_id;
    out.push_back(std::move(p));
  }
  return out;
}

void check_annotations(const std::vector<text::Token>& tokens,
                       const std::vector<annotate::TokenAnnotation>& annotations) {
  if (tokens.size() != annotations.size()) {
    throw ValidationError("probe: annotation count " +
                          std::to_string(annotations.size()) +
                          " does not match token count " +
                          std::to_string(tokens.size()));
  }
}

}  // namespace

std::string knowledge_type_name(KnowledgeType type) {
  return type == KnowledgeType::Factual ? "factual" : "relational";
}

KnowledgeType parse_knowledge_type(std::string_view s) {
  if (s == "factual") return KnowledgeType::Factual;
  if (s == "relational") return KnowledgeType::Relational;
  throw ValidationError("unknown knowledge type '" + std::string(s) + "'");
}

std::vector<Prompt> gen_factual_prompts(
    const corpus::Pair& pair,
    const std::vector<annotate::TokenAnnotation>& annotations,
    std::uint64_t seed, bool all_spans) {
  if (pair.hypothesis.label == corpus::Label::N) return {};
  const std::vector<text::Token> tokens = text::tokenize(pair.hypothesis.text);
  check_annotations(tokens, annotations);
  std::vector<Span> spans;
  std::vector<std::set<std::string>> golds;
  for (std::size_t i = 0; i < tokens.size();) {
    if (annotations[i].pos == annotate::Pos::PROPN) {
      std::size_t j = i;
      while (j < tokens.size() && annotations[j].pos == annotate::Pos::PROPN) {
        ++j;
      }
      spans.push_back({tokens[i].begin, tokens[j - 1].end});
      i = j;
    } else if (annotations[i].pos == annotate::Pos::NUM) {
      spans.push_back({tokens[i].begin, tokens[i].end});
      ++i;
    } else {
      ++i;
    }
    if (spans.size() > golds.size()) {
      const Span& s = spans.back();
      const std::string surface = text::lower(
          pair.hypothesis.text.substr(s.begin, s.end - s.begin));
      std::set<std::string> gold = {surface};
      add_numeral_alternates(gold, surface);
      golds.push_back(std::move(gold));
    }
  }
  return emit(pair, KnowledgeType::Factual, spans, golds, seed, all_spans);
}

std::vector<Prompt> gen_relational_prompts(
    const corpus::Pair& pair,
    const std::vector<annotate::TokenAnnotation>& annotations,
    const annotate::SynonymLexicon& lexicon, std::uint64_t seed,
    bool all_spans) {
  if (pair.hypothesis.label == corpus::Label::N) return {};
  const std::vector<text::Token> tokens = text::tokenize(pair.hypothesis.text);
  check_annotations(tokens, annotations);
  std::vector<Span> spans;
  std::vector<std::set<std::string>> golds;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (annotations[i].pos != annotate::Pos::VERB) continue;
    const std::string surface = text::lower(tokens[i].text);
    if (annotate::is_auxiliary(surface)) continue;
    spans.push_back({tokens[i].begin, tokens[i].end});
    std::set<std::string> gold = lexicon.synonyms(surface);
    for (const std::string& syn :
         lexicon.synonyms(annotate::verb_lemma(surface))) {
      gold.insert(syn);
    }
    golds.push_back(std::move(gold));
  }
  return emit(pair, KnowledgeType::Relational, spans, golds, seed, all_spans);
}

Prompt compose_with_premise(const Prompt& prompt, std::string_view premise_text) {
  if (prompt.with_premise) {
    throw ValidationError("prompt '" + prompt.id +
                          "' already carries a premise");
  }
  if (premise_text.empty()) {
    throw ValidationError("cannot compose prompt '" + prompt.id +
                          "' with an empty premise");
  }
  Prompt out = prompt;
  out.text_with_mask =
      std::string(premise_text) + " " + prompt.text_with_mask;
  out.with_premise = true;
  return out;
}

bool score_predictions(const Prompt& prompt,
                       const std::vector<std::string>& ranked, std::size_t k) {
  const std::size_t upto = std::min(k, ranked.size());
  for (std::size_t i = 0; i < upto; ++i) {
    const std::string folded = text::lower(ranked[i]);
    std::set<std::string> forms = {folded};
    add_numeral_alternates(forms, folded);
    for (const std::string& form : forms) {
      if (prompt.gold_surfaces.count(form)) return true;
    }
  }
  return false;
}

void ProbeScore::add(const Prompt& prompt,
                     const std::vector<std::string>& ranked) {
  CellStats& cell = cells[CellKey{prompt.knowledge_type, prompt.source_label,
                                  prompt.with_premise}];
  cell.total += 1;
  if (score_predictions(prompt, ranked, 1)) cell.top1_hits += 1;
  if (score_predictions(prompt, ranked, 5)) cell.top5_hits += 1;
}

void ProbeScore::merge(const ProbeScore& other) {
  for (const auto& [key, stats] : other.cells) {
    CellStats& cell = cells[key];
    cell.top1_hits += stats.top1_hits;
    cell.top5_hits += stats.top5_hits;
    cell.total += stats.total;
  }
}

std::string prompt_to_json(const Prompt& prompt) {
  nlohmann::ordered_json doc;
  doc["id"] = prompt.id;
  doc["text_with_mask"] = prompt.text_with_mask;
  doc["gold_surfaces"] = prompt.gold_surfaces;
  doc["knowledge_type"] = knowledge_type_name(prompt.knowledge_type);
  doc["source_label"] = corpus::label_name(prompt.source_label);
  doc["with_premise"] = prompt.with_premise;
  doc["table_id"] = prompt.table_id;
  doc["hyp_id"] = prompt.hyp_id;
  return doc.dump();
}

Prompt prompt_from_json(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("prompt: ") + e.what(), e.byte);
  }
  Prompt p;
  try {
    p.id = doc.at("id").get<std::string>();
    p.text_with_mask = doc.at("text_with_mask").get<std::string>();
    for (const auto& s : doc.at("gold_surfaces")) {
      p.gold_surfaces.insert(s.get<std::string>());
    }
    p.knowledge_type =
        parse_knowledge_type(doc.at("knowledge_type").get<std::string>());
    p.source_label = corpus::parse_label(doc.at("source_label").get<std::string>());
    p.with_premise = doc.at("with_premise").get<bool>();
    p.table_id = doc.value("table_id", std::string());
    p.hyp_id = doc.value("hyp_id", std::string());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("prompt: ") + e.what());
  }
  if (p.gold_surfaces.empty()) {
    throw ValidationError("prompt '" + p.id + "': empty gold set");
  }
  return p;
}

std::string prediction_to_json(const PredictionRecord& record) {
  nlohmann::ordered_json doc;
  doc["id"] = record.id;
  doc["ranked"] = record.ranked;
  return doc.dump();
}

PredictionRecord prediction_from_json(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("prediction: ") + e.what(), e.byte);
  }
  PredictionRecord record;
  try {
    record.id = doc.at("id").get<std::string>();
    record.ranked = doc.at("ranked").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("prediction: ") + e.what());
  }
  return record;
}

}  // namespace forge::probe
