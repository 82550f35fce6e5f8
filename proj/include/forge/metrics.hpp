#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "forge/corpus.hpp"

namespace forge::metrics {

struct PredictionSet {
  std::map<std::string, corpus::Label> entries;  // pair_ref -> label
  std::string model_name;
  std::string split;
};

// TSV, one "pair_ref<TAB>label" per line, no header.
PredictionSet parse_predictions(std::string_view tsv,
                                std::string model_name = {},
                                std::string split = {});
std::string serialize_predictions(const PredictionSet& predictions);

using GoldMap = std::map<std::string, corpus::Label>;

// Exact-match fraction; prediction and gold key sets must coincide.
double accuracy(const PredictionSet& predictions, const GoldMap& gold);

// Gold x predicted counts in label order E, N, C.
struct ConfusionMatrix {
  std::array<std::array<long, 3>, 3> counts{};

  long total() const;
  long trace() const;
};

ConfusionMatrix confusion(const PredictionSet& predictions,
                          const GoldMap& gold);

// Cell (x, y) counts pairs predicted x by A and y by B; the diagonal is the
// agreement mass.
ConfusionMatrix consistency_graph(const PredictionSet& a,
                                  const PredictionSet& b);

// Entailment-vs-contradiction accuracy: pairs whose gold or predicted label
// is N are removed first. An empty remainder raises ValidationError.
double two_label_accuracy(const PredictionSet& predictions,
                          const GoldMap& gold);

struct Report {
  struct Row {
    std::string name;
    std::vector<double> values;
  };

  std::vector<std::string> columns;  // value column headers
  std::vector<Row> rows;
};

enum class ReportFormat { csv, markdown };
ReportFormat parse_report_format(std::string_view s);

// Byte-deterministic table; rows ordered ascending by their first value,
// insertion order on ties, values printed with two decimals.
std::string render_report(const Report& report, ReportFormat format);

}  // namespace forge::metrics
