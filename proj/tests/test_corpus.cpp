#include <doctest.h>

#include "forge/corpus.hpp"
#include "forge/errors.hpp"
#include "forge/jsonio.hpp"

using namespace forge;

namespace {

const std::string kDataDir = FORGE_DATA_DIR;

corpus::Table sample_table() {
  return corpus::parse_table(
      jsonio::read_file(kDataDir + "/samples/breakfast_in_america.json"),
      corpus::TableFormat::canonical_json);
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("labels and splits round-trip") {
  CHECK(corpus::parse_label("E") == corpus::Label::E);
  CHECK(corpus::parse_label("N") == corpus::Label::N);
  CHECK(corpus::parse_label("C") == corpus::Label::C);
  CHECK_THROWS_AS(corpus::parse_label("e"), ValidationError);
  CHECK_THROWS_AS(corpus::parse_label("Entail"), ValidationError);
  CHECK(corpus::label_name(corpus::Label::N) == "N");
  CHECK(corpus::label_to_char(corpus::Label::C) == 'C');
  for (const char* name : {"train", "dev", "a1", "a2", "a3"}) {
    CHECK(corpus::split_name(corpus::parse_split(name)) == name);
  }
  CHECK_THROWS_AS(corpus::parse_split("test"), ValidationError);
}

TEST_CASE("table format names") {
  CHECK(corpus::parse_table_format("canonical") ==
        corpus::TableFormat::canonical_json);
  CHECK(corpus::parse_table_format("infotabs") ==
        corpus::TableFormat::infotabs_json);
  CHECK_THROWS_AS(corpus::parse_table_format("csv"), ValidationError);
}

TEST_CASE("canonical sample table parses with rows in document order") {
  const corpus::Table t = sample_table();
  CHECK(t.table_id == "T7");
  CHECK(t.title == "Breakfast in America");
  CHECK(t.category == "Album");
  REQUIRE(t.rows.size() == 7);
  CHECK(t.rows[0].key == "Released");
  CHECK(t.rows[0].values == std::vector<std::string>{"29 March 1979"});
  CHECK(t.rows[1].values == std::vector<std::string>{"May–December 1978"});
  CHECK(t.rows[3].key == "Genre");
  CHECK(t.rows[3].values ==
        std::vector<std::string>{"Pop", "art rock", "soft rock"});
  CHECK(t.rows[6].values ==
        std::vector<std::string>{"Peter Henderson", "Supertramp"});
}

TEST_CASE("infotabs shape parses to the same table") {
  const corpus::Table infotabs = corpus::parse_table(
      jsonio::read_file(kDataDir + "/samples/T7_infotabs.json"),
      corpus::TableFormat::infotabs_json);
  CHECK(infotabs == sample_table());
}

TEST_CASE("serialize_table round-trips") {
  const corpus::Table t = sample_table();
  const corpus::Table back = corpus::parse_table(
      corpus::serialize_table(t), corpus::TableFormat::canonical_json);
  CHECK(back == t);
}

TEST_CASE("malformed table documents raise typed errors") {
  CHECK_THROWS_AS(corpus::parse_table("{not json",
                                      corpus::TableFormat::canonical_json),
                  ParseError);
  CHECK_THROWS_AS(
      corpus::parse_table(R"({"table_id":"x","title":"t","category":"c"})",
                          corpus::TableFormat::canonical_json),
      ValidationError);
  CHECK_THROWS_AS(corpus::parse_table("[1,2]",
                                      corpus::TableFormat::infotabs_json),
                  ValidationError);
}

TEST_CASE("hypothesis TSV parses rows after the fixed header") {
  const std::vector<corpus::Hypothesis> hyps = corpus::parse_hypotheses(
      jsonio::read_file(kDataDir + "/samples/hypotheses.tsv"));
  REQUIRE(hyps.size() == 10);
  CHECK(hyps[0].hyp_id == "h1");
  CHECK(hyps[0].table_id == "T7");
  CHECK(hyps[0].label == corpus::Label::E);
  CHECK(hyps[1].label == corpus::Label::N);
  CHECK(hyps[8].text == "Peter Henderson's album was recorded in 1979.");
  CHECK(hyps[9].label == corpus::Label::C);
}

TEST_CASE("hypothesis TSV rejects bad headers, shapes, and labels") {
  CHECK_THROWS_AS(corpus::parse_hypotheses(""), ParseError);
  CHECK_THROWS_AS(corpus::parse_hypotheses("id\ttable\ttext\tlabel\n"),
                  ParseError);
  const std::string header = "hyp_id\ttable_id\ttext\tlabel\n";
  CHECK_THROWS_AS(corpus::parse_hypotheses(header + "h1\tT7\tonly three\n"),
                  ParseError);
  CHECK_THROWS_AS(corpus::parse_hypotheses(header + "h1\tT7\ttext\tQ\n"),
                  ValidationError);
  CHECK(corpus::parse_hypotheses(header).empty());
}

TEST_CASE("join_pairs pairs hypotheses with tables and collects rejects") {
  const corpus::Table t = sample_table();
  std::vector<corpus::Hypothesis> hyps = {
      {"h1", "T7", "text one", corpus::Label::E},
      {"h2", "T404", "orphan", corpus::Label::N},
      {"h3", "T7", "text two", corpus::Label::C},
  };
  const corpus::JoinResult joined =
      corpus::join_pairs({t}, hyps, corpus::Split::a1);
  REQUIRE(joined.pairs.size() == 2);
  CHECK(joined.pairs[0].hypothesis.hyp_id == "h1");
  CHECK(joined.pairs[0].split == corpus::Split::a1);
  CHECK(joined.pairs[1].hypothesis.hyp_id == "h3");
  REQUIRE(joined.rejects.size() == 1);
  CHECK(joined.rejects[0] == std::pair<std::string, std::string>{"h2", "T404"});
}

TEST_CASE("join_pairs rejects duplicate table ids") {
  const corpus::Table t = sample_table();
  CHECK_THROWS_AS(corpus::join_pairs({t, t}, {}, corpus::Split::dev),
                  ValidationError);
}

TEST_CASE("pair_ref is table_id:hyp_id") {
  CHECK(corpus::pair_ref("T7", "h4") == "T7:h4");
  corpus::Pair pair{sample_table(),
                    {"h9", "T7", "text", corpus::Label::C},
                    corpus::Split::dev};
  CHECK(corpus::pair_ref(pair) == "T7:h9");
}

}  // TEST_SUITE
