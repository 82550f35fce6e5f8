#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace forge::corpus {

enum class Label { E, N, C };

char label_to_char(Label label);
std::string label_name(Label label);
Label parse_label(std::string_view s);  // accepts "E"/"N"/"C", case-sensitive

enum class Split { train, dev, a1, a2, a3 };
std::string split_name(Split split);
Split parse_split(std::string_view s);

struct Row {
  std::string key;
  std::vector<std::string> values;

  bool operator==(const Row&) const = default;
};

struct Table {
  std::string table_id;
  std::string title;
  std::string category;
  std::vector<Row> rows;

  bool operator==(const Table&) const = default;
};

struct Hypothesis {
  std::string hyp_id;
  std::string table_id;
  std::string text;
  Label label = Label::E;

  bool operator==(const Hypothesis&) const = default;
};

struct Pair {
  Table table;
  Hypothesis hypothesis;
  Split split = Split::train;
};

enum class TableFormat { canonical_json, infotabs_json };
TableFormat parse_table_format(std::string_view s);

// Parses one table document. canonical_json is the native schema
// {"table_id","title","category","rows":[{"key","values":[...]}]};
// infotabs_json maps keys to value lists with the title under a "title" key
// and optional "table_id"/"category" string metadata. Values arrive
// pre-split and are never re-tokenized.
Table parse_table(std::string_view raw, TableFormat format);

// Canonical JSON writer; parse_table(serialize_table(t)) round-trips.
std::string serialize_table(const Table& table);

// TSV with header hyp_id<TAB>table_id<TAB>text<TAB>label.
std::vector<Hypothesis> parse_hypotheses(std::string_view tsv);

struct JoinResult {
  std::vector<Pair> pairs;
  // (hyp_id, table_id) of hypotheses whose table_id resolved to nothing.
  std::vector<std::pair<std::string, std::string>> rejects;
};

JoinResult join_pairs(const std::vector<Table>& tables,
                      const std::vector<Hypothesis>& hypotheses, Split split);

// Canonical pair key used across prediction files and record outputs.
std::string pair_ref(const Pair& pair);
std::string pair_ref(std::string_view table_id, std::string_view hyp_id);

}  // namespace forge::corpus
