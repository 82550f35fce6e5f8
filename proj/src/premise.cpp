#include "forge/premise.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/text.hpp"

namespace forge::premise {

namespace {

using text::lower;

std::string read_file(const std::filesystem::path& path,
                      std::string_view what) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open " + std::string(what) + " '" +
                          path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_placeholders(std::string_view tmpl) {
  std::size_t pos = 0;
  bool has_value = false;
  while (true) {
    std::size_t open = tmpl.find('$', pos);
    if (open == std::string_view::npos) break;
    std::size_t close = tmpl.find('$', open + 1);
    if (close == std::string_view::npos) {
      throw ValidationError("template '" + std::string(tmpl) +
                            "': unterminated placeholder");
    }
    std::string_view name = tmpl.substr(open + 1, close - open - 1);
    if (name == "value") {
      has_value = true;
    } else if (name != "key" && name != "title") {
      throw ValidationError("template '" + std::string(tmpl) +
                            "': unknown placeholder $" + std::string(name) +
                            "$");
    }
    pos = close + 1;
  }
  if (!has_value) {
    throw ValidationError("template '" + std::string(tmpl) +
                          "': missing $value$ placeholder");
  }
}

std::string substitute(std::string_view tmpl, std::string_view key,
                       std::string_view title, std::string_view value) {
  std::string out;
  out.reserve(tmpl.size() + value.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find('$', pos);
    if (open == std::string_view::npos) {
      out += tmpl.substr(pos);
      break;
    }
    out += tmpl.substr(pos, open - pos);
    std::size_t close = tmpl.find('$', open + 1);
    std::string_view name = tmpl.substr(open + 1, close - open - 1);
    if (name == "key") {
      out += lower(key);
    } else if (name == "title") {
      out += title;
    } else {
      out += value;
    }
    pos = close + 1;
  }
  return out;
}

bool ends_sentence(const std::string& s) {
  if (s.empty()) return false;
  const char c = s.back();
  return c == '.' || c == '!' || c == '?';
}

// Separator collision checks for the linear format. The padded separators
// can also arise from a value's own edge characters meeting the padding, so
// edges are validated too.
bool linearize_safe(std::string_view s, bool is_key) {
  if (s.find(" ; ") != std::string_view::npos) return false;
  if (s.find(" , ") != std::string_view::npos) return false;
  if (s.size() >= 2) {
    std::string_view head = s.substr(0, 2);
    std::string_view tail = s.substr(s.size() - 2);
    if (head == "; " || head == ", ") return false;
    if (tail == " ;" || tail == " ,") return false;
    if (is_key && tail == " :") return false;
  }
  if (is_key && s.find(" : ") != std::string_view::npos) return false;
  return true;
}

void require_safe(std::string_view s, bool is_key, const std::string& where) {
  if (!linearize_safe(s, is_key)) {
    throw ValidationError(where + ": '" + std::string(s) +
                          "' collides with linearization separators");
  }
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kStop = {
      "a",    "an",   "and",  "are",  "as",    "at",    "be",    "been",
      "being", "but", "by",   "did",  "do",    "does",  "for",   "from",
      "had",  "has",  "have", "how",  "in",    "is",    "it",    "its",
      "no",   "not",  "of",   "on",   "or",    "than",  "that",  "the",
      "then", "there", "these", "this", "those", "to",   "too",   "was",
      "were", "what", "when", "where", "which", "who",  "whom",  "whose",
      "with"};
  return kStop;
}

double stem_similarity(const std::string& a, const std::string& b) {
  if (a == b) return 1.0;
  if (text::common_prefix_length(a, b) >= 4) return 0.5;
  return 0.0;
}

std::vector<std::string> stems_of(std::string_view s) {
  std::vector<std::string> stems;
  for (const text::Token& t : text::tokenize(s)) {
    if (text::is_all_punct(t.text)) continue;
    stems.push_back(text::stem(t.text));
  }
  return stems;
}

}  // namespace

TemplateDB::TemplateDB() {
  entries_[{"*", "*"}] = std::string(kUniversalTemplate);
}

void TemplateDB::insert(std::string_view category, std::string_view key,
                        std::string_view tmpl) {
  check_placeholders(tmpl);
  const std::pair<std::string, std::string> slot{lower(category), lower(key)};
  auto [it, fresh] = entries_.emplace(slot, std::string(tmpl));
  if (!fresh && it->second != tmpl) {
    throw ValidationError("conflicting template for (" + slot.first + ", " +
                          slot.second + ")");
  }
}

TemplateDB TemplateDB::load(std::string_view tsv) {
  TemplateDB db;
  const std::vector<std::string> lines = text::split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos
                                             : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      throw ParseError("template file line " + std::to_string(i + 1) +
                       ": expected category<TAB>key<TAB>template");
    }
    db.insert(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1),
              line.substr(t2 + 1));
  }
  return db;
}

TemplateDB TemplateDB::load_file(const std::filesystem::path& path) {
  return load(read_file(path, "template file"));
}

const std::string& TemplateDB::lookup(std::string_view category,
                                      std::string_view key) const {
  auto it = entries_.find({lower(category), lower(key)});
  if (it != entries_.end()) return it->second;
  it = entries_.find({"*", lower(key)});
  if (it != entries_.end()) return it->second;
  return entries_.at({"*", "*"});
}

std::string render_row(const corpus::Table& table, const corpus::Row& row,
                       std::string_view tmpl) {
  const std::string value = text::join(row.values, ", ");
  std::string sentence = substitute(tmpl, row.key, table.title, value);
  sentence = text::capitalize_first(std::move(sentence));
  if (!ends_sentence(sentence)) sentence += '.';
  return sentence;
}

std::string render_universal(const corpus::Table& table) {
  std::vector<std::string> sentences;
  sentences.reserve(table.rows.size());
  for (const corpus::Row& row : table.rows) {
    sentences.push_back(render_row(table, row, kUniversalTemplate));
  }
  return text::join(sentences, " ");
}

std::string render_bpr(const corpus::Table& table,
                       const TemplateDB& templates) {
  std::vector<std::string> sentences;
  sentences.reserve(table.rows.size());
  for (const corpus::Row& row : table.rows) {
    sentences.push_back(
        render_row(table, row, templates.lookup(table.category, row.key)));
  }
  return text::join(sentences, " ");
}

std::string linearize(const corpus::Table& table) {
  require_safe(table.title, /*is_key=*/false, "title");
  std::string out = "title : " + table.title;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const corpus::Row& row = table.rows[i];
    const std::string where = "row " + std::to_string(i) + " ('" + row.key + "')";
    require_safe(row.key, /*is_key=*/true, where);
    for (const std::string& v : row.values) {
      require_safe(v, /*is_key=*/false, where);
    }
    out += " ; " + row.key + " : " + text::join(row.values, " , ");
  }
  return out;
}

corpus::Table parse_linearized(std::string_view s) {
  if (s.empty()) throw ParseError("empty linearized table", 0);
  std::vector<std::string> segments;
  std::size_t pos = 0;
  while (true) {
    std::size_t sep = s.find(" ; ", pos);
    if (sep == std::string_view::npos) {
      segments.emplace_back(s.substr(pos));
      break;
    }
    segments.emplace_back(s.substr(pos, sep - pos));
    pos = sep + 3;
  }
  corpus::Table table;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const std::string& seg = segments[i];
    std::size_t colon = seg.find(" : ");
    if (colon == std::string::npos) {
      throw ParseError("linearized segment " + std::to_string(i) +
                       ": missing ' : ' separator");
    }
    std::string key = seg.substr(0, colon);
    std::string rest = seg.substr(colon + 3);
    if (i == 0) {
      if (key != "title") {
        throw ParseError("linearized segment 0: expected 'title', got '" +
                         key + "'");
      }
      table.title = rest;
      continue;
    }
    corpus::Row row;
    row.key = std::move(key);
    std::size_t vpos = 0;
    while (true) {
      std::size_t comma = rest.find(" , ", vpos);
      if (comma == std::string::npos) {
        row.values.push_back(rest.substr(vpos));
        break;
      }
      row.values.push_back(rest.substr(vpos, comma - vpos));
      vpos = comma + 3;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

IdfTable load_idf(std::string_view tsv) {
  IdfTable idf;
  const std::vector<std::string> lines = text::split_lines(tsv);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (line.empty() || line[0] == '#') continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("idf file line " + std::to_string(i + 1) +
                       ": expected word<TAB>weight");
    }
    try {
      idf[lower(line.substr(0, tab))] = std::stod(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw ParseError("idf file line " + std::to_string(i + 1) +
                       ": bad weight '" + line.substr(tab + 1) + "'");
    }
  }
  return idf;
}

IdfTable load_idf_file(const std::filesystem::path& path) {
  return load_idf(read_file(path, "idf file"));
}

std::vector<RowScore> score_rows(const corpus::Table& table,
                                 std::string_view hypothesis_text,
                                 const IdfTable& idf) {
  struct HypToken {
    std::string stem;
    double weight;
  };
  std::vector<HypToken> hyp;
  for (const text::Token& t : text::tokenize(hypothesis_text)) {
    if (text::is_all_punct(t.text)) continue;
    const std::string lt = lower(t.text);
    if (stopwords().count(lt) > 0) continue;
    auto it = idf.find(lt);
    hyp.push_back(HypToken{text::stem(t.text),
                           it == idf.end() ? 1.0 : it->second});
  }
  const std::vector<std::string> title_stems = stems_of(table.title);
  std::vector<RowScore> scores;
  scores.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const corpus::Row& row = table.rows[r];
    std::vector<std::string> row_stems = stems_of(row.key);
    for (const std::string& v : row.values) {
      for (std::string& s : stems_of(v)) row_stems.push_back(std::move(s));
    }
    row_stems.insert(row_stems.end(), title_stems.begin(), title_stems.end());
    double total = 0.0;
    for (const HypToken& h : hyp) {
      double best = 0.0;
      for (const std::string& rs : row_stems) {
        best = std::max(best, stem_similarity(h.stem, rs));
        if (best == 1.0) break;
      }
      total += h.weight * best;
    }
    scores.push_back(RowScore{r, total});
  }
  return scores;
}

corpus::Table drr(const corpus::Table& table, std::string_view hypothesis_text,
                  std::size_t k, const IdfTable& idf) {
  if (k < 1) throw ValidationError("drr: k must be >= 1");
  if (table.rows.size() <= k) return table;
  const std::vector<RowScore> scores = score_rows(table, hypothesis_text, idf);
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&scores](std::size_t a, std::size_t b) {
                     return scores[a].score > scores[b].score;
                   });
  std::vector<std::size_t> kept(order.begin(), order.begin() + k);
  std::sort(kept.begin(), kept.end());
  corpus::Table out;
  out.table_id = table.table_id;
  out.title = table.title;
  out.category = table.category;
  for (std::size_t i : kept) out.rows.push_back(table.rows[i]);
  return out;
}

}  // namespace forge::premise
