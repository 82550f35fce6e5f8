#include "forge/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "forge/annotate.hpp"
#include "forge/corpus.hpp"
#include "forge/errors.hpp"
#include "forge/jsonio.hpp"
#include "forge/metrics.hpp"
#include "forge/perturb.hpp"
#include "forge/pet.hpp"
#include "forge/premise.hpp"
#include "forge/probe.hpp"
#include "forge/rng.hpp"
#include "forge/text.hpp"

namespace forge::cli {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_csv(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? s.size() : comma;
    std::string item(s.substr(start, end - start));
    while (!item.empty() && item.front() == ' ') item.erase(item.begin());
    while (!item.empty() && item.back() == ' ') item.pop_back();
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string stem_of(const fs::path& path) { return path.stem().string(); }

std::vector<corpus::Table> load_tables(const std::string& path,
                                       corpus::TableFormat format) {
  std::vector<corpus::Table> tables;
  auto add_document = [&tables, format](const std::string& raw,
                                        const std::string& fallback_id) {
    corpus::Table table = corpus::parse_table(raw, format);
    if (table.table_id.empty()) table.table_id = fallback_id;
    if (table.table_id.empty()) {
      throw ValidationError("table from '" + fallback_id +
                            "' carries no table_id");
    }
    tables.push_back(std::move(table));
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      throw ValidationError("no .json tables under '" + path + "'");
    }
    for (const fs::path& file : files) {
      add_document(jsonio::read_file(file), stem_of(file));
    }
    return tables;
  }
  const std::string raw = jsonio::read_file(path);
  const std::size_t first = raw.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && raw[first] == '[') {
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("table array '" + path + "': " + e.what(), e.byte);
    }
    std::size_t i = 0;
    for (const auto& element : doc) {
      add_document(element.dump(),
                   stem_of(path) + ":" + std::to_string(i));
      ++i;
    }
    return tables;
  }
  add_document(raw, stem_of(path));
  return tables;
}

std::vector<corpus::Pair> load_pairs(const std::string& tables_path,
                                     corpus::TableFormat format,
                                     const std::string& hyps_path,
                                     corpus::Split split,
                                     std::vector<std::pair<std::string, std::string>>*
                                         rejects_out = nullptr) {
  const std::vector<corpus::Table> tables = load_tables(tables_path, format);
  const std::vector<corpus::Hypothesis> hypotheses =
      corpus::parse_hypotheses(jsonio::read_file(hyps_path));
  corpus::JoinResult joined = corpus::join_pairs(tables, hypotheses, split);
  if (rejects_out != nullptr) *rejects_out = std::move(joined.rejects);
  return std::move(joined.pairs);
}

void emit(const std::string& out_path, std::string_view content) {
  if (out_path.empty()) {
    std::cout << content;
    return;
  }
  jsonio::write_file_atomic(out_path, content);
}

// Shared premise-side options for represent/export-batches/probe-gen.
struct RepresentOpts {
  std::string mode = "universal";
  std::string templates_path;
  std::size_t drr_k = 0;
  std::string idf_path;
};

struct RepresentContext {
  premise::TemplateDB templates;
  premise::IdfTable idf;
};

RepresentContext make_represent_context(const RepresentOpts& opts) {
  RepresentContext ctx;
  if (opts.mode != "universal" && opts.mode != "bpr" &&
      opts.mode != "linearized") {
    throw ValidationError("unknown representation mode '" + opts.mode + "'");
  }
  if (opts.mode == "bpr") {
    if (opts.templates_path.empty()) {
      throw ValidationError("--mode bpr needs --templates");
    }
    ctx.templates = premise::TemplateDB::load_file(opts.templates_path);
  }
  if (!opts.idf_path.empty()) {
    ctx.idf = premise::load_idf_file(opts.idf_path);
  }
  return ctx;
}

std::string premise_text_for(const corpus::Table& table,
                             std::string_view hypothesis_text,
                             const RepresentOpts& opts,
                             const RepresentContext& ctx) {
  corpus::Table pruned = table;
  if (opts.drr_k > 0) {
    pruned = premise::drr(table, hypothesis_text, opts.drr_k, ctx.idf);
  }
  if (opts.mode == "bpr") return premise::render_bpr(pruned, ctx.templates);
  if (opts.mode == "linearized") return premise::linearize(pruned);
  return premise::render_universal(pruned);
}

void add_represent_options(CLI::App* sub, RepresentOpts& opts) {
  sub->add_option("--mode", opts.mode,
                  "Premise form: universal, bpr, or linearized");
  sub->add_option("--templates", opts.templates_path,
                  "BPR template TSV (category, key, template)");
  sub->add_option("--drr", opts.drr_k,
                  "Keep only the k rows most relevant to the hypothesis");
  sub->add_option("--idf", opts.idf_path, "IDF weight TSV for row scoring");
}

corpus::Label gold_of(const pet::ClozeInstance& inst) { return inst.gold; }

// ---- subcommand bodies ----

struct IngestOpts {
  std::string tables, format = "canonical", hypotheses, split = "dev", out;
};

void run_ingest(const IngestOpts& o) {
  std::vector<std::pair<std::string, std::string>> rejects;
  const std::vector<corpus::Pair> pairs =
      load_pairs(o.tables, corpus::parse_table_format(o.format), o.hypotheses,
                 corpus::parse_split(o.split), &rejects);
  nlohmann::ordered_json doc;
  doc["split"] = o.split;
  nlohmann::ordered_json out_pairs = nlohmann::ordered_json::array();
  for (const corpus::Pair& pair : pairs) {
    nlohmann::ordered_json entry;
    entry["pair_ref"] = corpus::pair_ref(pair);
    entry["table"] =
        nlohmann::ordered_json::parse(corpus::serialize_table(pair.table));
    entry["hypothesis"] = {{"hyp_id", pair.hypothesis.hyp_id},
                           {"text", pair.hypothesis.text},
                           {"label", corpus::label_name(pair.hypothesis.label)}};
    out_pairs.push_back(std::move(entry));
  }
  doc["pairs"] = std::move(out_pairs);
  nlohmann::ordered_json out_rejects = nlohmann::ordered_json::array();
  for (const auto& [hyp_id, table_id] : rejects) {
    out_rejects.push_back({{"hyp_id", hyp_id}, {"table_id", table_id}});
  }
  doc["rejects"] = std::move(out_rejects);
  emit(o.out, doc.dump(2) + "\n");
}

struct RepresentCmdOpts {
  std::string tables, format = "canonical", hypotheses, split = "dev", out;
  RepresentOpts rep;
  bool plain = false;
};

void run_represent(const RepresentCmdOpts& o) {
  const corpus::TableFormat format = corpus::parse_table_format(o.format);
  const RepresentContext ctx = make_represent_context(o.rep);
  std::string out;
  if (o.rep.drr_k > 0 || !o.hypotheses.empty()) {
    if (o.hypotheses.empty()) {
      throw ValidationError("--drr needs --hypotheses to score rows against");
    }
    const std::vector<corpus::Pair> pairs = load_pairs(
        o.tables, format, o.hypotheses, corpus::parse_split(o.split));
    for (const corpus::Pair& pair : pairs) {
      const std::string rendered = premise_text_for(
          pair.table, pair.hypothesis.text, o.rep, ctx);
      if (o.plain) {
        out += rendered + "\n";
      } else {
        nlohmann::ordered_json line;
        line["pair_ref"] = corpus::pair_ref(pair);
        line["text"] = rendered;
        out += line.dump() + "\n";
      }
    }
  } else {
    for (const corpus::Table& table : load_tables(o.tables, format)) {
      const std::string rendered = premise_text_for(table, "", o.rep, ctx);
      if (o.plain) {
        out += rendered + "\n";
      } else {
        nlohmann::ordered_json line;
        line["table_id"] = table.table_id;
        line["text"] = rendered;
        out += line.dump() + "\n";
      }
    }
  }
  emit(o.out, out);
}

struct MaskOpts {
  std::string textarg, file, mode = "cwwm", out;
  double ratio = 0.15;
};

void run_mask(const MaskOpts& o, std::uint64_t seed) {
  std::vector<std::string> inputs;
  if (!o.textarg.empty()) inputs.push_back(o.textarg);
  if (!o.file.empty()) {
    for (std::string& line : text::split_lines(jsonio::read_file(o.file))) {
      if (!line.empty()) inputs.push_back(std::move(line));
    }
  }
  if (inputs.empty()) {
    throw ValidationError("mask: provide --text or --file");
  }
  if (o.mode != "cwwm" && o.mode != "token") {
    throw ValidationError("unknown mask mode '" + o.mode + "'");
  }
  std::string out;
  for (const std::string& input : inputs) {
    const std::vector<std::string> tokens =
        text::token_texts(text::tokenize(input));
    const std::uint64_t line_seed = Rng::mix(seed, input, o.mode);
    pet::MaskPlan plan;
    bool fallback = false;
    if (o.mode == "cwwm") {
      try {
        plan = pet::sample_cwwm_masks(tokens, annotate::pos_tag(tokens),
                                      o.ratio, line_seed);
      } catch (const FallbackToTokenMasking&) {
        plan = pet::sample_token_masks(tokens.size(), o.ratio, line_seed, {});
        fallback = true;
      }
    } else {
      plan = pet::sample_token_masks(tokens.size(), o.ratio, line_seed, {});
    }
    nlohmann::ordered_json line;
    line["text"] = input;
    line["tokens"] = tokens;
    line["mode"] = fallback ? "token" : o.mode;
    line["fallback"] = fallback;
    line["masked_positions"] = plan.masked_positions;
    line["grouping"] = plan.grouping;
    line["ratio"] = o.ratio;
    line["seed"] = line_seed;
    out += line.dump() + "\n";
  }
  emit(o.out, out);
}

struct ExportOpts {
  std::string tables, format = "canonical", hypotheses, split = "dev", out;
  RepresentOpts rep;
  std::string mask_mode = "cwwm";
  std::string conditions = "gold";
  double ratio = 0.15;
};

pet::MaskPlan context_plan(const pet::ClozeInstance& inst,
                           const std::string& mask_mode, double ratio,
                           std::uint64_t seed) {
  const std::set<std::size_t> protected_positions =
      pet::pattern_protected_positions(inst);
  if (mask_mode == "cwwm") {
    std::vector<annotate::TokenAnnotation> annotations =
        annotate::pos_tag(inst.tokens);
    for (std::size_t p : protected_positions) {
      annotations[p].pos = annotate::Pos::X;  // never maskable context
    }
    try {
      return pet::sample_cwwm_masks(inst.tokens, annotations, ratio,
                                    Rng::mix(seed, inst.id, "cwwm"));
    } catch (const FallbackToTokenMasking&) {
      // fall through to token masking
    }
  }
  return pet::sample_token_masks(inst.tokens.size(), ratio,
                                 Rng::mix(seed, inst.id, "token"),
                                 protected_positions);
}

void run_export(const ExportOpts& o, std::uint64_t seed) {
  if (o.mask_mode != "cwwm" && o.mask_mode != "token") {
    throw ValidationError("unknown mask mode '" + o.mask_mode + "'");
  }
  if (o.conditions != "gold" && o.conditions != "all" &&
      o.conditions != "none") {
    throw ValidationError("unknown conditions mode '" + o.conditions + "'");
  }
  const RepresentContext ctx = make_represent_context(o.rep);
  const std::vector<corpus::Pair> pairs =
      load_pairs(o.tables, corpus::parse_table_format(o.format), o.hypotheses,
                 corpus::parse_split(o.split));
  std::string out;
  for (const corpus::Pair& pair : pairs) {
    const std::string premise_text =
        premise_text_for(pair.table, pair.hypothesis.text, o.rep, ctx);
    pet::ClozeInstance inst =
        pet::build_pattern(premise_text, pair.hypothesis.text,
                           pair.hypothesis.label, corpus::pair_ref(pair));
    std::vector<std::size_t> context;
    try {
      context = context_plan(inst, o.mask_mode, o.ratio, seed).masked_positions;
    } catch (const ValidationError&) {
      // instance too short for any context mask; label slot still works
    }
    pet::MaskedBatchEntry entry;
    entry.id = inst.id;
    entry.tokens = inst.tokens;
    entry.label_mask_position = inst.label_mask_position;
    entry.context_mask_positions = context;
    entry.gold = gold_of(inst);
    if (o.conditions == "gold") {
      entry.condition = pet::verbalizer_for(inst.gold);
      out += pet::masked_batch_to_json(entry) + "\n";
    } else if (o.conditions == "none") {
      entry.condition.clear();
      out += pet::masked_batch_to_json(entry) + "\n";
    } else {
      for (corpus::Label label :
           {corpus::Label::E, corpus::Label::N, corpus::Label::C}) {
        pet::MaskedBatchEntry variant = entry;
        variant.id += ":" + corpus::label_name(label);
        variant.condition = pet::verbalizer_for(label);
        out += pet::masked_batch_to_json(variant) + "\n";
      }
    }
  }
  emit(o.out, out);
}

struct ProbeGenOpts {
  std::string tables, format = "canonical", hypotheses, split = "dev", out;
  std::string types = "factual,relational";
  std::string synonyms_path;
  bool all_spans = false;
  bool with_premise = false;
  RepresentOpts rep;
};

void run_probe_gen(const ProbeGenOpts& o, std::uint64_t seed) {
  bool want_factual = false;
  bool want_relational = false;
  for (const std::string& t : split_csv(o.types)) {
    if (t == "factual") {
      want_factual = true;
    } else if (t == "relational") {
      want_relational = true;
    } else {
      throw ValidationError("unknown knowledge type '" + t + "'");
    }
  }
  if (!want_factual && !want_relational) {
    throw ValidationError("--types selected nothing");
  }
  annotate::SynonymLexicon lexicon;
  if (!o.synonyms_path.empty()) {
    lexicon = annotate::SynonymLexicon::load_file(o.synonyms_path);
  }
  const RepresentContext ctx = make_represent_context(o.rep);
  const std::vector<corpus::Pair> pairs =
      load_pairs(o.tables, corpus::parse_table_format(o.format), o.hypotheses,
                 corpus::parse_split(o.split));
  std::string out;
  std::size_t skipped = 0;
  for (const corpus::Pair& pair : pairs) {
    const std::vector<annotate::TokenAnnotation> annotations =
        annotate::pos_tag(text::token_texts(text::tokenize(pair.hypothesis.text)));
    std::vector<probe::Prompt> prompts;
    if (want_factual) {
      std::vector<probe::Prompt> got =
          probe::gen_factual_prompts(pair, annotations, seed, o.all_spans);
      if (got.empty() && pair.hypothesis.label != corpus::Label::N) ++skipped;
      prompts.insert(prompts.end(), got.begin(), got.end());
    }
    if (want_relational) {
      std::vector<probe::Prompt> got = probe::gen_relational_prompts(
          pair, annotations, lexicon, seed, o.all_spans);
      if (got.empty() && pair.hypothesis.label != corpus::Label::N) ++skipped;
      prompts.insert(prompts.end(), got.begin(), got.end());
    }
    for (probe::Prompt& prompt : prompts) {
      if (o.with_premise) {
        prompt = probe::compose_with_premise(
            prompt,
            premise_text_for(pair.table, pair.hypothesis.text, o.rep, ctx));
      }
      out += probe::prompt_to_json(prompt) + "\n";
    }
  }
  std::cerr << "probe-gen: skipped " << skipped
            << " hypothesis/type combinations with no candidate span\n";
  emit(o.out, out);
}

struct ProbeScoreOpts {
  std::string prompts, predictions, k = "1,5", format = "csv", out;
};

void run_probe_score(const ProbeScoreOpts& o) {
  for (const std::string& k : split_csv(o.k)) {
    if (k != "1" && k != "5") {
      throw ValidationError("--k supports the values 1 and 5");
    }
  }
  std::vector<probe::Prompt> prompts;
  for (const std::string& line :
       jsonio::jsonl_lines(jsonio::read_file(o.prompts))) {
    prompts.push_back(probe::prompt_from_json(line));
  }
  std::map<std::string, std::vector<std::string>> ranked;
  for (const std::string& line :
       jsonio::jsonl_lines(jsonio::read_file(o.predictions))) {
    probe::PredictionRecord record = probe::prediction_from_json(line);
    ranked[record.id] = std::move(record.ranked);
  }
  probe::ProbeScore score;
  for (const probe::Prompt& prompt : prompts) {
    auto it = ranked.find(prompt.id);
    if (it == ranked.end()) {
      throw ValidationError("no prediction for prompt '" + prompt.id + "'");
    }
    score.add(prompt, it->second);
  }
  metrics::Report report;
  report.columns = {"top1_pct", "top5_pct", "total"};
  auto row_for = [](const std::string& name, const probe::CellStats& stats) {
    metrics::Report::Row row;
    row.name = name;
    const double denom = stats.total > 0 ? static_cast<double>(stats.total) : 1.0;
    row.values = {100.0 * static_cast<double>(stats.top1_hits) / denom,
                  100.0 * static_cast<double>(stats.top5_hits) / denom,
                  static_cast<double>(stats.total)};
    return row;
  };
  std::map<std::pair<probe::KnowledgeType, bool>, probe::CellStats> aggregate;
  for (const auto& [key, stats] : score.cells) {
    const std::string name = probe::knowledge_type_name(key.type) + "/" +
                             corpus::label_name(key.label) + "/" +
                             (key.with_premise ? "prem" : "hyp");
    report.rows.push_back(row_for(name, stats));
    probe::CellStats& agg = aggregate[{key.type, key.with_premise}];
    agg.top1_hits += stats.top1_hits;
    agg.top5_hits += stats.top5_hits;
    agg.total += stats.total;
  }
  for (const auto& [key, stats] : aggregate) {
    const std::string name = probe::knowledge_type_name(key.first) +
                             "/all/" + (key.second ? "prem" : "hyp");
    report.rows.push_back(row_for(name, stats));
  }
  emit(o.out,
       metrics::render_report(report, metrics::parse_report_format(o.format)));
}

struct PerturbOpts {
  std::string tables, format = "canonical", hypotheses, split = "dev", out;
  std::string kinds;
  std::string paraphraser = "identity";
  std::string paraphrases_path;
  std::string gazetteers_path;
  std::string names_path;
  int char_ops = 3;
  bool neg_c_to_e = false;
};

void run_perturb(const PerturbOpts& o, std::uint64_t seed) {
  std::vector<perturb::Kind> kinds;
  for (const std::string& k : split_csv(o.kinds)) {
    kinds.push_back(perturb::parse_kind(k));
  }
  if (kinds.empty()) throw ValidationError("--kinds selected nothing");
  annotate::Gazetteer gazetteer;
  const bool needs_gazetteer =
      std::any_of(kinds.begin(), kinds.end(), [](perturb::Kind k) {
        return k == perturb::Kind::Character || k == perturb::Kind::Location ||
               k == perturb::Kind::Name;
      });
  if (needs_gazetteer) {
    if (o.gazetteers_path.empty()) {
      throw ValidationError("--kinds " + o.kinds + " needs --gazetteers");
    }
    gazetteer = annotate::Gazetteer::load_dir(o.gazetteers_path);
  }
  perturb::Providers providers;
  providers.gazetteer = &gazetteer;
  providers.character_ops = o.char_ops;
  providers.rules.negation_c_to_e = o.neg_c_to_e;
  if (!o.names_path.empty()) {
    for (std::string& line :
         text::split_lines(jsonio::read_file(o.names_path))) {
      if (!line.empty() && line.front() != '#') {
        providers.name_list.push_back(std::move(line));
      }
    }
  }
  perturb::IdentityParaphraser identity;
  perturb::FrontingParaphraser fronting;
  perturb::FileMapParaphraser file_map;
  if (o.paraphraser == "identity") {
    providers.paraphraser = &identity;
  } else if (o.paraphraser == "fronting") {
    providers.paraphraser = &fronting;
  } else if (o.paraphraser == "file") {
    if (o.paraphrases_path.empty()) {
      throw ValidationError("--paraphraser file needs --paraphrases");
    }
    file_map = perturb::FileMapParaphraser::load_file(o.paraphrases_path);
    providers.paraphraser = &file_map;
  } else {
    throw ValidationError("unknown paraphraser '" + o.paraphraser + "'");
  }
  const std::vector<corpus::Pair> pairs =
      load_pairs(o.tables, corpus::parse_table_format(o.format), o.hypotheses,
                 corpus::parse_split(o.split));
  std::string out;
  std::size_t dropped = 0;
  for (const corpus::Pair& pair : pairs) {
    const std::uint64_t pair_seed =
        Rng::mix(seed, pair.table.table_id, pair.hypothesis.hyp_id);
    const perturb::PerturbationRecord record =
        perturb::compose(pair, kinds, pair_seed, providers);
    if (record.dropped) ++dropped;
    out += perturb::record_to_json(record) + "\n";
  }
  std::cerr << "perturb: " << dropped << " of " << pairs.size()
            << " records dropped\n";
  emit(o.out, out);
}

struct TrainToyOpts {
  int instances = 300;
  int steps = 500;
  int dim = 16;
  double lr = 0.5;
  double mask_ratio = 0.15;
  double mlm_weight = 1.0;
  std::string trace_out, dump_preds, dump_gold, out;
};

void run_train_toy(const TrainToyOpts& o, std::uint64_t seed) {
  if (o.instances < 3) {
    throw ValidationError("train-toy: need at least 3 instances");
  }
  pet::ToyScorerConfig config;
  config.vocab = pet::rule_dataset_vocab();
  config.embed_dim = o.dim;
  config.learning_rate = o.lr;
  config.steps = o.steps;
  config.seed = seed;
  config.mask_ratio = o.mask_ratio;
  config.mlm_weight = o.mlm_weight;
  const std::vector<pet::ClozeInstance> instances =
      pet::make_rule_dataset(o.instances, seed);
  pet::ToyScorer scorer(config);
  const pet::TrainStats stats = pet::toy_train(scorer, instances);
  long hits = 0;
  std::string preds_tsv, gold_tsv;
  for (const pet::ClozeInstance& inst : instances) {
    const corpus::Label predicted = pet::predict_label(scorer, inst);
    if (predicted == inst.gold) ++hits;
    preds_tsv += inst.id + "\t" + corpus::label_name(predicted) + "\n";
    gold_tsv += inst.id + "\t" + corpus::label_name(inst.gold) + "\n";
  }
  const double accuracy =
      static_cast<double>(hits) / static_cast<double>(instances.size());
  if (!o.trace_out.empty()) {
    nlohmann::ordered_json trace;
    trace["loss_trace"] = stats.loss_trace;
    jsonio::write_file_atomic(o.trace_out, trace.dump(2) + "\n");
  }
  if (!o.dump_preds.empty()) jsonio::write_file_atomic(o.dump_preds, preds_tsv);
  if (!o.dump_gold.empty()) jsonio::write_file_atomic(o.dump_gold, gold_tsv);
  nlohmann::ordered_json summary;
  summary["instances"] = o.instances;
  summary["steps"] = o.steps;
  if (!stats.loss_trace.empty()) {
    summary["initial_loss"] = stats.loss_trace.front();
    summary["final_loss"] = stats.loss_trace.back();
  }
  summary["accuracy"] = accuracy;
  emit(o.out, summary.dump(2) + "\n");
}

struct ScoreOpts {
  std::string preds, gold, preds_b, batches, logits, verbalizers, out;
  bool two_label = false;
  bool consistency = false;
  bool with_confusion = false;
};

std::string matrix_tsv(const char* title, const metrics::ConfusionMatrix& m) {
  static const char* kLabels[3] = {"E", "N", "C"};
  std::string out = std::string(title) + "\tE\tN\tC\n";
  for (int g = 0; g < 3; ++g) {
    out += kLabels[g];
    for (int p = 0; p < 3; ++p) {
      out += "\t" + std::to_string(m.counts[static_cast<std::size_t>(g)]
                                           [static_cast<std::size_t>(p)]);
    }
    out += "\n";
  }
  return out;
}

void run_score(const ScoreOpts& o) {
  char double_buf[32];
  if (!o.batches.empty() || !o.logits.empty()) {
    if (o.batches.empty() || o.logits.empty()) {
      throw ValidationError("score: --batches and --logits go together");
    }
    const std::vector<std::string> ids = split_csv(o.verbalizers);
    if (ids.size() != 3) {
      throw ValidationError(
          "score: --verbalizers needs three vocab ids, e.g. 7,8,9");
    }
    pet::VerbalizerIds verbalizer_ids;
    try {
      verbalizer_ids.yes = std::stoi(ids[0]);
      verbalizer_ids.maybe = std::stoi(ids[1]);
      verbalizer_ids.no = std::stoi(ids[2]);
    } catch (const std::exception&) {
      throw ValidationError("score: --verbalizers must be integers");
    }
    std::map<std::string, pet::LogitRecord> records;
    for (const std::string& line :
         jsonio::jsonl_lines(jsonio::read_file(o.logits))) {
      pet::LogitRecord record = pet::logit_record_from_json(line);
      records[record.id] = std::move(record);
    }
    std::string preds_tsv;
    long hits = 0, total = 0;
    for (const std::string& line :
         jsonio::jsonl_lines(jsonio::read_file(o.batches))) {
      const pet::MaskedBatchEntry entry = pet::masked_batch_from_json(line);
      auto it = records.find(entry.id);
      if (it == records.end()) {
        throw ValidationError("score: no logits for batch entry '" +
                              entry.id + "'");
      }
      const corpus::Label predicted = pet::predict_from_logits(
          it->second.rows.row(0).transpose(), verbalizer_ids);
      preds_tsv += entry.id + "\t" + corpus::label_name(predicted) + "\n";
      ++total;
      if (predicted == entry.gold) ++hits;
    }
    std::snprintf(double_buf, sizeof(double_buf), "%.6f",
                  total > 0 ? static_cast<double>(hits) /
                                  static_cast<double>(total)
                            : 0.0);
    std::cerr << "score: accuracy " << double_buf << " over " << total
              << " entries\n";
    emit(o.out, preds_tsv);
    return;
  }
  if (o.preds.empty()) throw ValidationError("score: --preds is required");
  const metrics::PredictionSet preds =
      metrics::parse_predictions(jsonio::read_file(o.preds));
  if (o.consistency) {
    if (o.preds_b.empty()) {
      throw ValidationError("score: --consistency needs --preds-b");
    }
    const metrics::PredictionSet preds_b =
        metrics::parse_predictions(jsonio::read_file(o.preds_b));
    emit(o.out, matrix_tsv("A\\B", metrics::consistency_graph(preds, preds_b)));
    return;
  }
  if (o.gold.empty()) throw ValidationError("score: --gold is required");
  const metrics::PredictionSet gold_set =
      metrics::parse_predictions(jsonio::read_file(o.gold));
  const metrics::GoldMap& gold = gold_set.entries;
  std::string out;
  const double acc = o.two_label ? metrics::two_label_accuracy(preds, gold)
                                 : metrics::accuracy(preds, gold);
  std::snprintf(double_buf, sizeof(double_buf), "%.6f", acc);
  out += std::string(o.two_label ? "two_label_accuracy" : "accuracy") + "\t" +
         double_buf + "\n";
  if (o.with_confusion) {
    out += matrix_tsv("gold\\pred", metrics::confusion(preds, gold));
  }
  emit(o.out, out);
}

struct ReportOpts {
  std::string input, column = "accuracy", format = "csv", out;
  bool baseline_random = false;
};

void run_report(const ReportOpts& o) {
  metrics::Report report;
  report.columns = {o.column};
  std::size_t row_number = 0;
  for (const std::string& line : text::split_lines(jsonio::read_file(o.input))) {
    ++row_number;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("report row " + std::to_string(row_number) +
                       ": expected name<TAB>value");
    }
    metrics::Report::Row row;
    row.name = line.substr(0, tab);
    try {
      row.values = {std::stod(line.substr(tab + 1))};
    } catch (const std::exception&) {
      throw ParseError("report row " + std::to_string(row_number) +
                       ": value is not a number");
    }
    report.rows.push_back(std::move(row));
  }
  if (o.baseline_random) {
    report.rows.push_back({"random", {33.33}});
  }
  emit(o.out,
       metrics::render_report(report, metrics::parse_report_format(o.format)));
}

void print_json_error(const Error& error) {
  nlohmann::ordered_json doc;
  doc["error"] = error.kind();
  doc["message"] = error.what();
  if (const auto* parse = dynamic_cast<const ParseError*>(&error);
      parse != nullptr && parse->offset() != ParseError::npos) {
    doc["offset"] = parse->offset();
  }
  std::cerr << doc.dump() << "\n";
}

int exit_code_for(const Error& error) {
  if (error.kind() == "ParseError") return 2;
  if (error.kind() == "NumericalError") return 3;
  return 1;
}

}  // namespace

int run(int argc, const char* const* argv) {
  bool json_errors = false;
  for (int i = 1; i < argc; ++i) {
    if (std::string_view(argv[i]) == "--json-errors") json_errors = true;
  }
  CLI::App app{"forge: tables + hypotheses -> premises, cloze batches, "
               "knowledge prompts, perturbation sets, and reports"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key/value config file; flags win");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Root seed for every random choice")
      ->capture_default_str();
  bool json_errors_flag = false;
  app.add_flag("--json-errors", json_errors_flag,
               "Machine-readable errors on stderr");

  IngestOpts ingest;
  CLI::App* ingest_cmd =
      app.add_subcommand("ingest", "Join tables with hypotheses");
  ingest_cmd->add_option("--tables", ingest.tables, "Table file or directory")
      ->required();
  ingest_cmd->add_option("--format", ingest.format,
                         "Table format: canonical or infotabs");
  ingest_cmd->add_option("--hypotheses", ingest.hypotheses, "Hypothesis TSV")
      ->required();
  ingest_cmd->add_option("--split", ingest.split, "Split tag for the pairs");
  ingest_cmd->add_option("--out", ingest.out, "Output path (default stdout)");
  ingest_cmd->callback([&ingest] { run_ingest(ingest); });

  RepresentCmdOpts represent;
  CLI::App* represent_cmd =
      app.add_subcommand("represent", "Render premise text for tables");
  represent_cmd
      ->add_option("--tables", represent.tables, "Table file or directory")
      ->required();
  represent_cmd->add_option("--format", represent.format,
                            "Table format: canonical or infotabs");
  represent_cmd->add_option("--hypotheses", represent.hypotheses,
                            "Hypothesis TSV (required with --drr)");
  represent_cmd->add_option("--split", represent.split, "Split tag");
  add_represent_options(represent_cmd, represent.rep);
  represent_cmd->add_flag("--plain", represent.plain,
                          "Emit bare text lines instead of JSONL");
  represent_cmd->add_option("--out", represent.out,
                            "Output path (default stdout)");
  represent_cmd->callback([&represent] { run_represent(represent); });

  MaskOpts mask;
  CLI::App* mask_cmd =
      app.add_subcommand("mask", "Sample mask plans for raw text");
  mask_cmd->add_option("--text", mask.textarg, "Text to mask");
  mask_cmd->add_option("--file", mask.file, "File with one text per line");
  mask_cmd->add_option("--ratio", mask.ratio, "Target mask ratio");
  mask_cmd->add_option("--mode", mask.mode, "cwwm or token");
  mask_cmd->add_option("--out", mask.out, "Output path (default stdout)");
  mask_cmd->callback([&mask, &seed] { run_mask(mask, seed); });

  ExportOpts export_opts;
  CLI::App* export_cmd = app.add_subcommand(
      "export-batches", "Emit cloze batches with mask plans as JSONL");
  export_cmd
      ->add_option("--tables", export_opts.tables, "Table file or directory")
      ->required();
  export_cmd->add_option("--format", export_opts.format,
                         "Table format: canonical or infotabs");
  export_cmd
      ->add_option("--hypotheses", export_opts.hypotheses, "Hypothesis TSV")
      ->required();
  export_cmd->add_option("--split", export_opts.split, "Split tag");
  add_represent_options(export_cmd, export_opts.rep);
  export_cmd->add_option("--ratio", export_opts.ratio, "Context mask ratio");
  export_cmd->add_option("--mask-mode", export_opts.mask_mode,
                         "cwwm or token");
  export_cmd->add_option(
      "--conditions", export_opts.conditions,
      "Label-slot fills per pair: gold, all, or none");
  export_cmd->add_option("--out", export_opts.out,
                         "Output path (default stdout)");
  export_cmd->callback(
      [&export_opts, &seed] { run_export(export_opts, seed); });

  ProbeGenOpts probe_gen;
  CLI::App* probe_gen_cmd =
      app.add_subcommand("probe-gen", "Generate knowledge prompts");
  probe_gen_cmd
      ->add_option("--tables", probe_gen.tables, "Table file or directory")
      ->required();
  probe_gen_cmd->add_option("--format", probe_gen.format,
                            "Table format: canonical or infotabs");
  probe_gen_cmd
      ->add_option("--hypotheses", probe_gen.hypotheses, "Hypothesis TSV")
      ->required();
  probe_gen_cmd->add_option("--split", probe_gen.split, "Split tag");
  probe_gen_cmd->add_option("--types", probe_gen.types,
                            "factual, relational, or both (comma separated)");
  probe_gen_cmd->add_option("--synonyms", probe_gen.synonyms_path,
                            "Synonym lexicon TSV for relational golds");
  probe_gen_cmd->add_flag("--all-spans", probe_gen.all_spans,
                          "One prompt per candidate span");
  probe_gen_cmd->add_flag("--with-premise", probe_gen.with_premise,
                          "Prefix prompts with the rendered premise");
  add_represent_options(probe_gen_cmd, probe_gen.rep);
  probe_gen_cmd->add_option("--out", probe_gen.out,
                            "Output path (default stdout)");
  probe_gen_cmd->callback(
      [&probe_gen, &seed] { run_probe_gen(probe_gen, seed); });

  ProbeScoreOpts probe_score;
  CLI::App* probe_score_cmd = app.add_subcommand(
      "probe-score", "Score ranked predictions against prompts");
  probe_score_cmd
      ->add_option("--prompts", probe_score.prompts, "Prompt JSONL")
      ->required();
  probe_score_cmd
      ->add_option("--predictions", probe_score.predictions,
                   "Prediction JSONL {id, ranked}")
      ->required();
  probe_score_cmd->add_option("--k", probe_score.k,
                              "Comma list of cutoffs (1 and 5)");
  probe_score_cmd->add_option("--format", probe_score.format,
                              "csv or markdown");
  probe_score_cmd->add_option("--out", probe_score.out,
                              "Output path (default stdout)");
  probe_score_cmd->callback([&probe_score] { run_probe_score(probe_score); });

  PerturbOpts perturb_opts;
  CLI::App* perturb_cmd =
      app.add_subcommand("perturb", "Generate perturbation records");
  perturb_cmd
      ->add_option("--tables", perturb_opts.tables, "Table file or directory")
      ->required();
  perturb_cmd->add_option("--format", perturb_opts.format,
                          "Table format: canonical or infotabs");
  perturb_cmd
      ->add_option("--hypotheses", perturb_opts.hypotheses, "Hypothesis TSV")
      ->required();
  perturb_cmd->add_option("--split", perturb_opts.split, "Split tag");
  perturb_cmd
      ->add_option("--kinds", perturb_opts.kinds,
                   "Ordered comma list, e.g. number,paraphrase,name")
      ->required();
  perturb_cmd->add_option("--paraphraser", perturb_opts.paraphraser,
                          "identity, file, or fronting");
  perturb_cmd->add_option("--paraphrases", perturb_opts.paraphrases_path,
                          "TSV hyp_id<TAB>paraphrase for --paraphraser file");
  perturb_cmd->add_option("--gazetteers", perturb_opts.gazetteers_path,
                          "Gazetteer directory");
  perturb_cmd->add_option("--names", perturb_opts.names_path,
                          "Name list file, one full name per line");
  perturb_cmd->add_option("--char-ops", perturb_opts.char_ops,
                          "Character edits per hypothesis");
  perturb_cmd->add_flag("--neg-c-to-e", perturb_opts.neg_c_to_e,
                        "Negating a contradiction yields entailment");
  perturb_cmd->add_option("--out", perturb_opts.out,
                          "Output path (default stdout)");
  perturb_cmd->callback(
      [&perturb_opts, &seed] { run_perturb(perturb_opts, seed); });

  TrainToyOpts train_toy;
  CLI::App* train_toy_cmd = app.add_subcommand(
      "train-toy", "Train the toy cloze scorer on the rule dataset");
  train_toy_cmd->add_option("--instances", train_toy.instances,
                            "Synthetic dataset size");
  train_toy_cmd->add_option("--steps", train_toy.steps, "Training steps");
  train_toy_cmd->add_option("--dim", train_toy.dim, "Embedding width");
  train_toy_cmd->add_option("--lr", train_toy.lr, "Learning rate");
  train_toy_cmd->add_option("--mask-ratio", train_toy.mask_ratio,
                            "Context mask ratio");
  train_toy_cmd->add_option("--mlm-weight", train_toy.mlm_weight,
                            "Weight of the label-conditioned MLM terms");
  train_toy_cmd->add_option("--trace-out", train_toy.trace_out,
                            "Write the loss trace JSON here");
  train_toy_cmd->add_option("--dump-preds", train_toy.dump_preds,
                            "Write predictions TSV here");
  train_toy_cmd->add_option("--dump-gold", train_toy.dump_gold,
                            "Write gold TSV here");
  train_toy_cmd->add_option("--out", train_toy.out,
                            "Summary output path (default stdout)");
  train_toy_cmd->callback(
      [&train_toy, &seed] { run_train_toy(train_toy, seed); });

  ScoreOpts score;
  CLI::App* score_cmd =
      app.add_subcommand("score", "Accuracy, confusion, and consistency");
  score_cmd->add_option("--preds", score.preds, "Prediction TSV");
  score_cmd->add_option("--gold", score.gold, "Gold TSV");
  score_cmd->add_flag("--two-label", score.two_label,
                      "Drop N pairs before scoring");
  score_cmd->add_flag("--confusion", score.with_confusion,
                      "Also print the gold-by-predicted matrix");
  score_cmd->add_flag("--consistency", score.consistency,
                      "Compare two prediction sets instead of gold");
  score_cmd->add_option("--preds-b", score.preds_b,
                        "Second prediction TSV for --consistency");
  score_cmd->add_option("--batches", score.batches,
                        "Masked batch JSONL (with --logits)");
  score_cmd->add_option("--logits", score.logits,
                        "Externally computed logit JSONL");
  score_cmd->add_option("--verbalizers", score.verbalizers,
                        "Vocab ids for Yes,Maybe,No in the logit rows");
  score_cmd->add_option("--out", score.out, "Output path (default stdout)");
  score_cmd->callback([&score] { run_score(score); });

  ReportOpts report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Render a sorted metric table");
  report_cmd->add_option("--input", report.input, "TSV name<TAB>value")
      ->required();
  report_cmd->add_option("--column", report.column, "Value column header");
  report_cmd->add_flag("--baseline-random", report.baseline_random,
                       "Append the 33.33 random baseline row");
  report_cmd->add_option("--format", report.format, "csv or markdown");
  report_cmd->add_option("--out", report.out, "Output path (default stdout)");
  report_cmd->callback([&report] { run_report(report); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    if (json_errors) {
      print_json_error(e);
    } else {
      std::cerr << "forge: " << e.kind() << ": " << e.what() << "\n";
    }
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "forge: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace forge::cli
