#include <doctest.h>

#include "forge/annotate.hpp"
#include "forge/corpus.hpp"
#include "forge/errors.hpp"
#include "forge/probe.hpp"
#include "forge/text.hpp"

using namespace forge;

namespace {

corpus::Pair make_pair(const std::string& hyp_text, corpus::Label label,
                       const std::string& hyp_id = "h1") {
  corpus::Pair pair;
  pair.table.table_id = "T7";
  pair.table.title = "Breakfast in America";
  pair.hypothesis = {hyp_id, "T7", hyp_text, label};
  return pair;
}

std::vector<annotate::TokenAnnotation> tag(const std::string& sentence) {
  std::vector<std::string> surfaces;
  for (const text::Token& t : text::tokenize(sentence)) {
    surfaces.push_back(t.text);
  }
  return annotate::pos_tag(surfaces);
}

annotate::SynonymLexicon sample_lexicon() {
  return annotate::SynonymLexicon::load_file(
      std::string(FORGE_DATA_DIR) + "/lexicons/synonyms.tsv");
}

}  // namespace

TEST_SUITE("probe") {

TEST_CASE("factual prompts mask proper-noun runs and numerals") {
  const corpus::Pair pair =
      make_pair("Duration of Breakfast in America is 46 minutes.",
                corpus::Label::E, "h4");
  const auto prompts = probe::gen_factual_prompts(
      pair, tag(pair.hypothesis.text), 0, /*all_spans=*/true);
  REQUIRE(prompts.size() == 4);
  // Proper-noun runs break at the preposition, so the title splits in two.
  CHECK(prompts[0].text_with_mask ==
        "<mask> of Breakfast in America is 46 minutes.");
  CHECK(prompts[0].gold_surfaces == std::set<std::string>{"duration"});
  CHECK(prompts[1].text_with_mask ==
        "Duration of <mask> in America is 46 minutes.");
  CHECK(prompts[2].gold_surfaces == std::set<std::string>{"america"});
  CHECK(prompts[3].text_with_mask ==
        "Duration of Breakfast in America is <mask> minutes.");
  CHECK(prompts[3].gold_surfaces ==
        std::set<std::string>{"46", "forty-six"});
  CHECK(prompts[3].id == "factual:T7:h4:3");
  CHECK(prompts[3].knowledge_type == probe::KnowledgeType::Factual);
  CHECK(prompts[3].source_label == corpus::Label::E);
  CHECK_FALSE(prompts[3].with_premise);
  CHECK(prompts[3].table_id == "T7");
  CHECK(prompts[3].hyp_id == "h4");
}

TEST_CASE("a multi-token proper-noun run is masked as one span") {
  const corpus::Pair pair =
      make_pair("Peter Henderson produces only rock albums.",
                corpus::Label::E, "h2");
  const auto prompts = probe::gen_factual_prompts(
      pair, tag(pair.hypothesis.text), 0, /*all_spans=*/true);
  REQUIRE(prompts.size() == 1);
  CHECK(prompts[0].text_with_mask == "<mask> produces only rock albums.");
  CHECK(prompts[0].gold_surfaces == std::set<std::string>{"peter henderson"});
}

TEST_CASE("neutral hypotheses yield no prompts") {
  const corpus::Pair pair =
      make_pair("Peter Henderson produces only rock albums.",
                corpus::Label::N, "h2");
  const auto annotations = tag(pair.hypothesis.text);
  CHECK(probe::gen_factual_prompts(pair, annotations, 0, true).empty());
  CHECK(probe::gen_relational_prompts(pair, annotations, sample_lexicon(), 0,
                                      true)
            .empty());
}

TEST_CASE("sampling draws one prompt deterministically") {
  const corpus::Pair pair =
      make_pair("Duration of Breakfast in America is 46 minutes.",
                corpus::Label::E, "h4");
  const auto annotations = tag(pair.hypothesis.text);
  const auto all =
      probe::gen_factual_prompts(pair, annotations, 3, /*all_spans=*/true);
  const auto one = probe::gen_factual_prompts(pair, annotations, 3);
  REQUIRE(one.size() == 1);
  bool found = false;
  for (const probe::Prompt& p : all) {
    if (p.id == one[0].id) {
      found = true;
      CHECK(p.text_with_mask == one[0].text_with_mask);
    }
  }
  CHECK(found);
  CHECK(probe::gen_factual_prompts(pair, annotations, 3)[0].id == one[0].id);
}

TEST_CASE("relational prompts mask main verbs with synonym gold sets") {
  const corpus::Pair pair =
      make_pair("Peter Henderson produces only rock albums.",
                corpus::Label::E, "h2");
  const auto prompts = probe::gen_relational_prompts(
      pair, tag(pair.hypothesis.text), sample_lexicon(), 0, true);
  REQUIRE(prompts.size() == 1);
  CHECK(prompts[0].id == "relational:T7:h2:0");
  CHECK(prompts[0].text_with_mask == "Peter Henderson <mask> only rock albums.");
  const std::set<std::string> expected = {
      "produces", "produce", "make", "create",
      "craft",    "generate", "manufacture"};
  CHECK(prompts[0].gold_surfaces == expected);
}

TEST_CASE("auxiliaries never become relational spans") {
  const corpus::Pair pair =
      make_pair("The album is a hit.", corpus::Label::E, "h9");
  CHECK(probe::gen_relational_prompts(pair, tag(pair.hypothesis.text),
                                      sample_lexicon(), 0, true)
            .empty());
}

TEST_CASE("annotation length must match the hypothesis tokens") {
  const corpus::Pair pair = make_pair("Two words.", corpus::Label::E);
  CHECK_THROWS_AS(probe::gen_factual_prompts(pair, {}, 0, true),
                  ValidationError);
}

TEST_CASE("composing with a premise prefixes once") {
  probe::Prompt prompt;
  prompt.id = "factual:T7:h4:0";
  prompt.text_with_mask = "<mask> minutes.";
  prompt.gold_surfaces = {"46"};
  const probe::Prompt composed =
      probe::compose_with_premise(prompt, "The premise text.");
  CHECK(composed.text_with_mask == "The premise text. <mask> minutes.");
  CHECK(composed.with_premise);
  CHECK_THROWS_AS(probe::compose_with_premise(composed, "again"),
                  ValidationError);
  CHECK_THROWS_AS(probe::compose_with_premise(prompt, ""), ValidationError);
}

TEST_CASE("scoring folds case and numeral spellings inside the window") {
  probe::Prompt prompt;
  prompt.id = "factual:x:y:0";
  prompt.gold_surfaces = {"46", "forty-six"};
  CHECK(probe::score_predictions(prompt, {"Forty-Six"}, 1));
  CHECK_FALSE(probe::score_predictions(prompt, {"wrong", "46"}, 1));
  CHECK(probe::score_predictions(prompt, {"wrong", "46"}, 5));
  CHECK_FALSE(probe::score_predictions(prompt, {}, 5));

  probe::Prompt word_gold;
  word_gold.gold_surfaces = {"two"};
  CHECK(probe::score_predictions(word_gold, {"2"}, 1));
  probe::Prompt digit_gold;
  digit_gold.gold_surfaces = {"1979"};
  CHECK(probe::score_predictions(digit_gold, {"nineteen seventy-nine"}, 1));
}

TEST_CASE("probe score accumulates per (type, label, premise) cell") {
  probe::Prompt prompt;
  prompt.knowledge_type = probe::KnowledgeType::Relational;
  prompt.source_label = corpus::Label::C;
  prompt.gold_surfaces = {"record"};
  probe::ProbeScore score;
  score.add(prompt, {"record"});
  score.add(prompt, {"wrong", "record"});
  score.add(prompt, {"wrong"});
  const probe::CellKey key{probe::KnowledgeType::Relational, corpus::Label::C,
                           false};
  REQUIRE(score.cells.count(key) == 1);
  CHECK(score.cells.at(key).top1_hits == 1);
  CHECK(score.cells.at(key).top5_hits == 2);
  CHECK(score.cells.at(key).total == 3);

  probe::ProbeScore other;
  other.add(prompt, {"record"});
  score.merge(other);
  CHECK(score.cells.at(key).top1_hits == 2);
  CHECK(score.cells.at(key).total == 4);
}

TEST_CASE("prompts and predictions round-trip through JSONL") {
  probe::Prompt prompt;
  prompt.id = "relational:T7:h2:0";
  prompt.text_with_mask = "Peter Henderson <mask> only rock albums.";
  prompt.gold_surfaces = {"produce", "make"};
  prompt.knowledge_type = probe::KnowledgeType::Relational;
  prompt.source_label = corpus::Label::E;
  prompt.with_premise = true;
  prompt.table_id = "T7";
  prompt.hyp_id = "h2";
  const probe::Prompt back =
      probe::prompt_from_json(probe::prompt_to_json(prompt));
  CHECK(back.id == prompt.id);
  CHECK(back.text_with_mask == prompt.text_with_mask);
  CHECK(back.gold_surfaces == prompt.gold_surfaces);
  CHECK(back.knowledge_type == prompt.knowledge_type);
  CHECK(back.source_label == prompt.source_label);
  CHECK(back.with_premise == prompt.with_premise);
  CHECK(back.table_id == "T7");
  CHECK(back.hyp_id == "h2");

  CHECK_THROWS_AS(probe::prompt_from_json("{not json"), ParseError);
  prompt.gold_surfaces.clear();
  CHECK_THROWS_AS(probe::prompt_from_json(probe::prompt_to_json(prompt)),
                  ValidationError);

  probe::PredictionRecord record{"relational:T7:h2:0", {"produce", "tape"}};
  const probe::PredictionRecord rec_back =
      probe::prediction_from_json(probe::prediction_to_json(record));
  CHECK(rec_back.id == record.id);
  CHECK(rec_back.ranked == record.ranked);
  CHECK_THROWS_AS(probe::prediction_from_json(R"({"id":"x"})"), ParseError);
}

TEST_CASE("knowledge type names round-trip") {
  CHECK(probe::knowledge_type_name(probe::KnowledgeType::Factual) == "factual");
  CHECK(probe::parse_knowledge_type("relational") ==
        probe::KnowledgeType::Relational);
  CHECK_THROWS_AS(probe::parse_knowledge_type("weird"), ValidationError);
}

}  // TEST_SUITE
