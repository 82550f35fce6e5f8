#include "forge/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "forge/errors.hpp"
#include "forge/text.hpp"

namespace forge::metrics {

namespace {

void check_same_keys(const std::map<std::string, corpus::Label>& a,
                     const std::map<std::string, corpus::Label>& b,
                     const char* a_name, const char* b_name) {
  std::vector<std::string> only_a, only_b;
  for (const auto& [key, label] : a) {
    if (b.count(key) == 0) only_a.push_back(key);
  }
  for (const auto& [key, label] : b) {
    if (a.count(key) == 0) only_b.push_back(key);
  }
  if (only_a.empty() && only_b.empty()) return;
  std::ostringstream msg;
  msg << "key sets differ:";
  auto describe = [&msg](const std::vector<std::string>& keys,
                         const char* where) {
    if (keys.empty()) return;
    msg << " only in " << where << ":";
    for (std::size_t i = 0; i < keys.size() && i < 5; ++i) {
      msg << " " << keys[i];
    }
    if (keys.size() > 5) msg << " (+" << keys.size() - 5 << " more)";
  };
  describe(only_a, a_name);
  describe(only_b, b_name);
  throw ValidationError(msg.str());
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

PredictionSet parse_predictions(std::string_view tsv, std::string model_name,
                                std::string split) {
  PredictionSet out;
  out.model_name = std::move(model_name);
  out.split = std::move(split);
  std::size_t row = 0;
  for (const std::string& line : text::split_lines(tsv)) {
    ++row;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("predictions row " + std::to_string(row) +
                       ": expected pair_ref<TAB>label");
    }
    const std::string key = line.substr(0, tab);
    if (key.empty()) {
      throw ParseError("predictions row " + std::to_string(row) +
                       ": empty pair_ref");
    }
    const corpus::Label label = corpus::parse_label(line.substr(tab + 1));
    if (!out.entries.emplace(key, label).second) {
      throw ValidationError("duplicate prediction for pair '" + key + "'");
    }
  }
  return out;
}

std::string serialize_predictions(const PredictionSet& predictions) {
  std::string out;
  for (const auto& [key, label] : predictions.entries) {
    out += key;
    out += '\t';
    out += corpus::label_name(label);
    out += '\n';
  }
  return out;
}

double accuracy(const PredictionSet& predictions, const GoldMap& gold) {
  check_same_keys(predictions.entries, gold, "predictions", "gold");
  if (gold.empty()) throw ValidationError("accuracy: empty prediction set");
  long hits = 0;
  for (const auto& [key, label] : gold) {
    if (predictions.entries.at(key) == label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

long ConfusionMatrix::total() const {
  long sum = 0;
  for (const auto& row : counts) {
    for (long cell : row) sum += cell;
  }
  return sum;
}

long ConfusionMatrix::trace() const {
  return counts[0][0] + counts[1][1] + counts[2][2];
}

ConfusionMatrix confusion(const PredictionSet& predictions,
                          const GoldMap& gold) {
  check_same_keys(predictions.entries, gold, "predictions", "gold");
  ConfusionMatrix m;
  for (const auto& [key, gold_label] : gold) {
    const auto g = static_cast<std::size_t>(gold_label);
    const auto p = static_cast<std::size_t>(predictions.entries.at(key));
    m.counts[g][p] += 1;
  }
  return m;
}

ConfusionMatrix consistency_graph(const PredictionSet& a,
                                  const PredictionSet& b) {
  check_same_keys(a.entries, b.entries, "first set", "second set");
  ConfusionMatrix m;
  for (const auto& [key, label_a] : a.entries) {
    const auto x = static_cast<std::size_t>(label_a);
    const auto y = static_cast<std::size_t>(b.entries.at(key));
    m.counts[x][y] += 1;
  }
  return m;
}

double two_label_accuracy(const PredictionSet& predictions,
                          const GoldMap& gold) {
  check_same_keys(predictions.entries, gold, "predictions", "gold");
  long hits = 0;
  long total = 0;
  for (const auto& [key, gold_label] : gold) {
    const corpus::Label pred = predictions.entries.at(key);
    if (gold_label == corpus::Label::N || pred == corpus::Label::N) continue;
    ++total;
    if (pred == gold_label) ++hits;
  }
  if (total == 0) {
    throw ValidationError("two_label_accuracy: no E/C pairs remain");
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "markdown") return ReportFormat::markdown;
  throw ValidationError("unknown report format '" + std::string(s) + "'");
}

std::string render_report(const Report& report, ReportFormat format) {
  for (const Report::Row& row : report.rows) {
    if (row.values.size() != report.columns.size()) {
      throw ValidationError("report row '" + row.name + "' has " +
                            std::to_string(row.values.size()) +
                            " values for " +
                            std::to_string(report.columns.size()) +
                            " columns");
    }
  }
  std::vector<Report::Row> rows = report.rows;
  std::stable_sort(rows.begin(), rows.end(),
                   [](const Report::Row& a, const Report::Row& b) {
                     if (a.values.empty() || b.values.empty()) {
                       return a.values.size() < b.values.size();
                     }
                     return a.values.front() < b.values.front();
                   });
  std::string out;
  if (format == ReportFormat::csv) {
    out += "name";
    for (const std::string& column : report.columns) {
      out += ',';
      out += column;
    }
    out += '\n';
    for (const Report::Row& row : rows) {
      out += row.name;
      for (double v : row.values) {
        out += ',';
        out += format_value(v);
      }
      out += '\n';
    }
    return out;
  }
  out += "| name |";
  for (const std::string& column : report.columns) {
    out += ' ';
    out += column;
    out += " |";
  }
  out += "\n|---|";
  for (std::size_t i = 0; i < report.columns.size(); ++i) out += "---|";
  out += '\n';
  for (const Report::Row& row : rows) {
    out += "| ";
    out += row.name;
    out += " |";
    for (double v : row.values) {
      out += ' ';
      out += format_value(v);
      out += " |";
    }
    out += '\n';
  }
  return out;
}

}  // namespace forge::metrics
