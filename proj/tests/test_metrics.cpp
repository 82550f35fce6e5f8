#include <doctest.h>

#include <string>

#include "forge/errors.hpp"
#include "forge/metrics.hpp"
#include "forge/rng.hpp"

using namespace forge;
using corpus::Label;

namespace {

metrics::PredictionSet preds(
    std::initializer_list<std::pair<std::string, Label>> entries) {
  metrics::PredictionSet out;
  for (const auto& [key, label] : entries) out.entries.emplace(key, label);
  return out;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("prediction TSV round-trips and rejects malformed rows") {
  const std::string tsv = "T1:h1\tE\nT1:h2\tN\nT2:h1\tC\n";
  const metrics::PredictionSet set =
      metrics::parse_predictions(tsv, "model-a", "dev");
  CHECK(set.model_name == "model-a");
  CHECK(set.split == "dev");
  REQUIRE(set.entries.size() == 3);
  CHECK(set.entries.at("T1:h2") == Label::N);
  CHECK(metrics::serialize_predictions(set) == tsv);
  // Blank lines are tolerated.
  CHECK(metrics::parse_predictions("\nT1:h1\tE\n\n").entries.size() == 1);

  CHECK_THROWS_AS(metrics::parse_predictions("T1:h1 E\n"), ParseError);
  CHECK_THROWS_AS(metrics::parse_predictions("\tE\n"), ParseError);
  CHECK_THROWS_AS(metrics::parse_predictions("T1:h1\tQ\n"), ValidationError);
  CHECK_THROWS_AS(metrics::parse_predictions("T1:h1\tE\nT1:h1\tC\n"),
                  ValidationError);
}

TEST_CASE("accuracy is the exact-match fraction over identical key sets") {
  const metrics::GoldMap gold = {
      {"a", Label::E}, {"b", Label::N}, {"c", Label::C}, {"d", Label::E}};
  const metrics::PredictionSet perfect =
      preds({{"a", Label::E}, {"b", Label::N}, {"c", Label::C}, {"d", Label::E}});
  CHECK(metrics::accuracy(perfect, gold) == 1.0);
  const metrics::PredictionSet half =
      preds({{"a", Label::E}, {"b", Label::C}, {"c", Label::N}, {"d", Label::E}});
  CHECK(metrics::accuracy(half, gold) == 0.5);
  CHECK_THROWS_AS(metrics::accuracy(metrics::PredictionSet{}, {}),
                  ValidationError);
  const metrics::PredictionSet extra = preds(
      {{"a", Label::E}, {"b", Label::N}, {"c", Label::C}, {"z", Label::E}});
  CHECK_THROWS_WITH_AS(metrics::accuracy(extra, gold),
                       "key sets differ: only in predictions: z only in "
                       "gold: d",
                       ValidationError);
}

TEST_CASE("key mismatch reports at most five examples per side") {
  metrics::PredictionSet many;
  for (int i = 0; i < 8; ++i) {
    many.entries.emplace("p" + std::to_string(i), Label::E);
  }
  try {
    metrics::accuracy(many, {{"g", Label::E}});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("(+3 more)") != std::string::npos);
    CHECK(what.find("only in gold: g") != std::string::npos);
  }
}

TEST_CASE("confusion counts land in gold-major cells") {
  const metrics::GoldMap gold = {
      {"a", Label::E}, {"b", Label::E}, {"c", Label::N}, {"d", Label::C}};
  const metrics::PredictionSet set = preds(
      {{"a", Label::E}, {"b", Label::C}, {"c", Label::N}, {"d", Label::E}});
  const metrics::ConfusionMatrix m = metrics::confusion(set, gold);
  CHECK(m.counts[0][0] == 1);  // E gold, E predicted
  CHECK(m.counts[0][2] == 1);  // E gold, C predicted
  CHECK(m.counts[1][1] == 1);
  CHECK(m.counts[2][0] == 1);
  CHECK(m.total() == 4);
  CHECK(m.trace() == 2);
}

TEST_CASE("a prediction set agrees with itself on the diagonal") {
  const metrics::PredictionSet set = preds(
      {{"a", Label::E}, {"b", Label::N}, {"c", Label::C}, {"d", Label::N}});
  const metrics::ConfusionMatrix m = metrics::consistency_graph(set, set);
  CHECK(m.trace() == 4);
  CHECK(m.total() == 4);
  const metrics::PredictionSet other = preds(
      {{"a", Label::C}, {"b", Label::N}, {"c", Label::C}, {"d", Label::E}});
  const metrics::ConfusionMatrix cross = metrics::consistency_graph(set, other);
  CHECK(cross.counts[0][2] == 1);  // a: E by the first, C by the second
  CHECK(cross.trace() == 2);
}

TEST_CASE("two-label accuracy removes neutral gold and neutral predictions") {
  const metrics::GoldMap gold = {
      {"a", Label::E}, {"b", Label::N}, {"c", Label::C}, {"d", Label::C}};
  const metrics::PredictionSet set = preds(
      {{"a", Label::E}, {"b", Label::C}, {"c", Label::N}, {"d", Label::E}});
  // Kept pairs: a (hit) and d (miss); b and c drop out.
  CHECK(metrics::two_label_accuracy(set, gold) == 0.5);
  const metrics::GoldMap all_n = {{"a", Label::N}, {"b", Label::N}};
  const metrics::PredictionSet n_preds =
      preds({{"a", Label::E}, {"b", Label::C}});
  CHECK_THROWS_AS(metrics::two_label_accuracy(n_preds, all_n),
                  ValidationError);
}

TEST_CASE("report rendering sorts ascending by the first value") {
  metrics::Report report;
  report.columns = {"dev", "a1"};
  report.rows = {{"model-b", {71.5, 60.25}},
                 {"model-a", {55.13, 58.0}},
                 {"model-c", {55.13, 40.0}}};
  CHECK(metrics::render_report(report, metrics::ReportFormat::csv) ==
        "name,dev,a1\n"
        "model-a,55.13,58.00\n"
        "model-c,55.13,40.00\n"
        "model-b,71.50,60.25\n");
  CHECK(metrics::render_report(report, metrics::ReportFormat::markdown) ==
        "| name | dev | a1 |\n"
        "|---|---|---|\n"
        "| model-a | 55.13 | 58.00 |\n"
        "| model-c | 55.13 | 40.00 |\n"
        "| model-b | 71.50 | 60.25 |\n");
  report.rows.push_back({"ragged", {1.0}});
  CHECK_THROWS_AS(metrics::render_report(report, metrics::ReportFormat::csv),
                  ValidationError);
  CHECK(metrics::parse_report_format("csv") == metrics::ReportFormat::csv);
  CHECK(metrics::parse_report_format("markdown") ==
        metrics::ReportFormat::markdown);
  CHECK_THROWS_AS(metrics::parse_report_format("tsv"), ValidationError);
}

TEST_CASE("accuracy equals trace over total on random label sets") {
  Rng rng(404);
  for (int round = 0; round < 50; ++round) {
    metrics::PredictionSet set;
    metrics::GoldMap gold;
    const std::size_t n = 1 + rng.index(40);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string key = "p" + std::to_string(i);
      gold[key] = static_cast<Label>(rng.index(3));
      set.entries[key] = static_cast<Label>(rng.index(3));
    }
    const metrics::ConfusionMatrix m = metrics::confusion(set, gold);
    CHECK(metrics::accuracy(set, gold) ==
          static_cast<double>(m.trace()) / static_cast<double>(m.total()));
  }
}

}  // TEST_SUITE
