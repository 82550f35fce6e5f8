#include "forge/corpus.hpp"

#include <map>
#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/text.hpp"

namespace forge::corpus {

namespace {

using ordered_json = nlohmann::ordered_json;

void validate_parsed_table(const Table& table) {
  if (table.title.empty()) {
    throw ValidationError("table '" + table.table_id + "': empty title");
  }
  if (table.rows.empty()) {
    throw ValidationError("table '" + table.table_id + "': zero rows");
  }
  for (const Row& row : table.rows) {
    bool any = false;
    for (const std::string& v : row.values) {
      if (!v.empty()) any = true;
    }
    if (!any) {
      throw ValidationError("table '" + table.table_id + "': row '" +
                            row.key + "' has no non-empty value");
    }
  }
}

ordered_json parse_json(std::string_view raw) {
  try {
    return ordered_json::parse(raw);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

std::vector<std::string> value_list(const ordered_json& v,
                                    const std::string& key) {
  std::vector<std::string> values;
  if (v.is_string()) {
    values.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& item : v) {
      if (!item.is_string()) {
        throw ValidationError("row '" + key + "': non-string value");
      }
      values.push_back(item.get<std::string>());
    }
  } else {
    throw ValidationError("row '" + key + "': value is not string or list");
  }
  return values;
}

Table parse_canonical(const ordered_json& doc) {
  Table table;
  if (!doc.is_object()) throw ValidationError("table document is not an object");
  table.table_id = doc.value("table_id", std::string());
  table.title = doc.value("title", std::string());
  table.category = doc.value("category", std::string());
  if (!doc.contains("rows") || !doc["rows"].is_array()) {
    throw ValidationError("table '" + table.table_id + "': missing rows list");
  }
  for (const auto& row_doc : doc["rows"]) {
    if (!row_doc.is_object() || !row_doc.contains("key") ||
        !row_doc.contains("values")) {
      throw ValidationError("table '" + table.table_id +
                            "': row without key/values");
    }
    Row row;
    row.key = row_doc["key"].get<std::string>();
    row.values = value_list(row_doc["values"], row.key);
    table.rows.push_back(std::move(row));
  }
  return table;
}

Table parse_infotabs(const ordered_json& doc) {
  Table table;
  if (!doc.is_object()) throw ValidationError("table document is not an object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "table_id" && value.is_string()) {
      table.table_id = value.get<std::string>();
      continue;
    }
    if (key == "category" && value.is_string()) {
      table.category = value.get<std::string>();
      continue;
    }
    if (key == "title") {
      std::vector<std::string> t = value_list(value, key);
      if (t.empty()) throw ValidationError("empty title");
      table.title = t.front();
      continue;
    }
    Row row;
    row.key = key;
    row.values = value_list(value, key);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace

char label_to_char(Label label) {
  switch (label) {
    case Label::E: return 'E';
    case Label::N: return 'N';
    case Label::C: return 'C';
  }
  return '?';
}

std::string label_name(Label label) { return std::string(1, label_to_char(label)); }

Label parse_label(std::string_view s) {
  if (s == "E") return Label::E;
  if (s == "N") return Label::N;
  if (s == "C") return Label::C;
  throw ValidationError("unknown label '" + std::string(s) +
                        "' (expected E, N, or C)");
}

std::string split_name(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::a1: return "a1";
    case Split::a2: return "a2";
    case Split::a3: return "a3";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "a1") return Split::a1;
  if (s == "a2") return Split::a2;
  if (s == "a3") return Split::a3;
  throw ValidationError("unknown split '" + std::string(s) + "'");
}

TableFormat parse_table_format(std::string_view s) {
  if (s == "canonical" || s == "canonical_json") return TableFormat::canonical_json;
  if (s == "infotabs" || s == "infotabs_json") return TableFormat::infotabs_json;
  throw ValidationError("unknown table format '" + std::string(s) + "'");
}

Table parse_table(std::string_view raw, TableFormat format) {
  const ordered_json doc = parse_json(raw);
  Table table = format == TableFormat::canonical_json ? parse_canonical(doc)
                                                      : parse_infotabs(doc);
  validate_parsed_table(table);
  return table;
}

std::string serialize_table(const Table& table) {
  ordered_json doc;
  doc["table_id"] = table.table_id;
  doc["title"] = table.title;
  doc["category"] = table.category;
  doc["rows"] = ordered_json::array();
  for (const Row& row : table.rows) {
    ordered_json r;
    r["key"] = row.key;
    r["values"] = row.values;
    doc["rows"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

std::vector<Hypothesis> parse_hypotheses(std::string_view tsv) {
  const std::vector<std::string> lines = text::split_lines(tsv);
  if (lines.empty()) throw ParseError("hypothesis file is empty", 0);
  static const std::string kHeader = "hyp_id\ttable_id\ttext\tlabel";
  if (lines.front() != kHeader) {
    throw ParseError("hypothesis file: bad header (expected '" + kHeader +
                     "')", 0);
  }
  std::vector<Hypothesis> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) {
        cols.push_back(line.substr(pos));
        break;
      }
      cols.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    if (cols.size() != 4) {
      throw ParseError("hypothesis row " + std::to_string(i) + ": expected 4 "
                       "tab-separated columns, got " +
                       std::to_string(cols.size()));
    }
    Hypothesis h;
    h.hyp_id = cols[0];
    h.table_id = cols[1];
    h.text = cols[2];
    try {
      h.label = parse_label(cols[3]);
    } catch (const ValidationError& e) {
      throw ValidationError("hypothesis row " + std::to_string(i) + ": " +
                            e.what());
    }
    out.push_back(std::move(h));
  }
  return out;
}

JoinResult join_pairs(const std::vector<Table>& tables,
                      const std::vector<Hypothesis>& hypotheses, Split split) {
  std::map<std::string, const Table*> by_id;
  for (const Table& t : tables) {
    if (!by_id.emplace(t.table_id, &t).second) {
      throw ValidationError("duplicate table_id '" + t.table_id + "'");
    }
  }
  JoinResult result;
  for (const Hypothesis& h : hypotheses) {
    auto it = by_id.find(h.table_id);
    if (it == by_id.end()) {
      result.rejects.emplace_back(h.hyp_id, h.table_id);
      continue;
    }
    result.pairs.push_back(Pair{*it->second, h, split});
  }
  return result;
}

std::string pair_ref(const Pair& pair) {
  return pair_ref(pair.table.table_id, pair.hypothesis.hyp_id);
}

std::string pair_ref(std::string_view table_id, std::string_view hyp_id) {
  return std::string(table_id) + ":" + std::string(hyp_id);
}

}  // namespace forge::corpus
