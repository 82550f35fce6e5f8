#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "forge/corpus.hpp"

namespace forge::premise {

// The fallback sentence form applied to any row: key is lowercased on
// substitution, the sentence is first-letter capitalized and gets a terminal
// period.
inline constexpr std::string_view kUniversalTemplate =
    "the $key$ of $title$ is $value$";

// Sentence templates selected by (category, key), most specific first:
// (category, key) over (*, key) over (*, *). Matching is case-insensitive;
// the (*, *) entry always exists and is the universal template.
class TemplateDB {
 public:
  TemplateDB();

  // TSV rows: category<TAB>key<TAB>template, "*" as wildcard. Templates must
  // reference $value$ and may reference $key$/$title$; anything else inside
  // $...$ is rejected.
  static TemplateDB load(std::string_view tsv);
  static TemplateDB load_file(const std::filesystem::path& path);

  const std::string& lookup(std::string_view category,
                            std::string_view key) const;
  std::size_t size() const { return entries_.size(); }

 private:
  void insert(std::string_view category, std::string_view key,
              std::string_view tmpl);
  std::map<std::pair<std::string, std::string>, std::string> entries_;
};

// One sentence per row from the universal template, joined by single spaces.
// Multi-valued rows join their values with ", ". Zero rows yield "".
std::string render_universal(const corpus::Table& table);

// Same walk with per-row template selection from the database.
std::string render_bpr(const corpus::Table& table, const TemplateDB& templates);

std::string render_row(const corpus::Table& table, const corpus::Row& row,
                       std::string_view tmpl);

// "title : <title> ; <key> : <v1> , <v2> ; ..." with exactly " ; ", " : "
// and " , " as separators. Keys/values that would collide with the
// separators are rejected with ValidationError naming the row.
std::string linearize(const corpus::Table& table);

// Inverse of linearize. table_id and category are not carried by the format
// and come back empty.
corpus::Table parse_linearized(std::string_view s);

using IdfTable = std::unordered_map<std::string, double>;

// TSV rows: word<TAB>weight. Absent words weigh 1.0.
IdfTable load_idf(std::string_view tsv);
IdfTable load_idf_file(const std::filesystem::path& path);

struct RowScore {
  std::size_t row_index = 0;
  double score = 0.0;
};

// Lexical alignment between hypothesis content tokens and row tokens
// (key + values + title), stem-exact match = 1, shared stem prefix >= 4
// chars = 0.5, summed with per-word IDF weights. Returned in row order.
std::vector<RowScore> score_rows(const corpus::Table& table,
                                 std::string_view hypothesis_text,
                                 const IdfTable& idf);

// Keeps the k best-scoring rows (ties toward earlier rows), re-emitted in
// original order. Tables with <= k rows pass through unchanged. k >= 1.
corpus::Table drr(const corpus::Table& table, std::string_view hypothesis_text,
                  std::size_t k, const IdfTable& idf);

}  // namespace forge::premise
