#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "forge/annotate.hpp"
#include "forge/corpus.hpp"

namespace forge::probe {

enum class KnowledgeType { Factual, Relational };

std::string knowledge_type_name(KnowledgeType type);
KnowledgeType parse_knowledge_type(std::string_view s);

// Fill-in-the-blank knowledge prompt with exactly one masked span.
struct Prompt {
  std::string id;
  std::string text_with_mask;
  std::set<std::string> gold_surfaces;  // lowercased acceptable fills
  KnowledgeType knowledge_type = KnowledgeType::Factual;
  corpus::Label source_label = corpus::Label::E;
  bool with_premise = false;
  std::string table_id;
  std::string hyp_id;
};

// Masks one maximal proper-noun run or one numeral token of the hypothesis.
// The gold set holds the removed surface plus its numeral spelling in the
// other direction when the span is numeric. Neutral hypotheses and
// hypotheses without a candidate span yield nothing. With all_spans every
// candidate becomes a prompt; otherwise one is sampled.
std::vector<Prompt> gen_factual_prompts(
    const corpus::Pair& pair,
    const std::vector<annotate::TokenAnnotation>& annotations,
    std::uint64_t seed, bool all_spans = false);

// Masks one main verb (auxiliaries excluded); the gold set is the synonym
// closure of the verb surface and its lemma.
std::vector<Prompt> gen_relational_prompts(
    const corpus::Pair& pair,
    const std::vector<annotate::TokenAnnotation>& annotations,
    const annotate::SynonymLexicon& lexicon, std::uint64_t seed,
    bool all_spans = false);

// premise + " " + prompt text; refuses empty premises and double composition.
Prompt compose_with_premise(const Prompt& prompt, std::string_view premise_text);

// True when any of the first k ranked candidates, lowercased and with
// numeral spellings normalized in both directions, lands in the gold set.
bool score_predictions(const Prompt& prompt,
                       const std::vector<std::string>& ranked, std::size_t k);

struct CellKey {
  KnowledgeType type = KnowledgeType::Factual;
  corpus::Label label = corpus::Label::E;
  bool with_premise = false;

  auto operator<=>(const CellKey&) const = default;
};

struct CellStats {
  long top1_hits = 0;
  long top5_hits = 0;
  long total = 0;
};

struct ProbeScore {
  std::map<CellKey, CellStats> cells;

  void add(const Prompt& prompt, const std::vector<std::string>& ranked);
  void merge(const ProbeScore& other);
};

struct PredictionRecord {
  std::string id;
  std::vector<std::string> ranked;
};

std::string prompt_to_json(const Prompt& prompt);
Prompt prompt_from_json(std::string_view line);
std::string prediction_to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(std::string_view line);

}  // namespace forge::probe
