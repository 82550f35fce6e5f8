#include <doctest.h>

#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "forge/cli.hpp"
#include "forge/jsonio.hpp"
#include "forge/pet.hpp"

using namespace forge;
namespace fs = std::filesystem;

namespace {

const std::string kData = FORGE_DATA_DIR;
const std::string kGolden = FORGE_GOLDEN_DIR;
const std::string kSampleTable = kData + "/samples/breakfast_in_america.json";
const std::string kSampleHyps = kData + "/samples/hypotheses.tsv";

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> owned;
  owned.reserve(args.size() + 1);
  owned.emplace_back("forge");
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(owned.size());
  for (const std::string& s : owned) argv.push_back(s.c_str());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

struct StreamCapture {
  explicit StreamCapture(std::ostream& stream)
      : stream_(stream), old_(stream.rdbuf(buffer_.rdbuf())) {}
  ~StreamCapture() { stream_.rdbuf(old_); }
  std::string text() const { return buffer_.str(); }

 private:
  std::ostream& stream_;
  std::stringstream buffer_;
  std::streambuf* old_;
};

struct TempDir {
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("forge-cli-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
  fs::path path;
};

std::vector<std::string> lines_of(const std::string& path) {
  return jsonio::jsonl_lines(jsonio::read_file(path));
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("represent renders all three premise forms to golden bytes") {
  TempDir tmp;
  REQUIRE(run_cli({"represent", "--tables", kSampleTable, "--plain", "--out",
                   tmp.file("u.txt")}) == 0);
  CHECK(jsonio::read_file(tmp.file("u.txt")) ==
        jsonio::read_file(kGolden + "/table1_universal.txt"));

  REQUIRE(run_cli({"represent", "--tables", kSampleTable, "--mode", "bpr",
                   "--templates", kData + "/templates/bpr_templates.tsv",
                   "--plain", "--out", tmp.file("b.txt")}) == 0);
  CHECK(jsonio::read_file(tmp.file("b.txt")) ==
        jsonio::read_file(kGolden + "/table1_bpr.txt"));

  REQUIRE(run_cli({"represent", "--tables", kSampleTable, "--mode",
                   "linearized", "--plain", "--out", tmp.file("l.txt")}) == 0);
  CHECK(jsonio::read_file(tmp.file("l.txt")) ==
        jsonio::read_file(kGolden + "/table1_linearized.txt"));
}

TEST_CASE("represent with --drr prunes rows against each hypothesis") {
  TempDir tmp;
  REQUIRE(run_cli({"represent", "--tables", kSampleTable, "--hypotheses",
                   kSampleHyps, "--drr", "4", "--plain", "--out",
                   tmp.file("drr.txt")}) == 0);
  const std::vector<std::string> rendered = lines_of(tmp.file("drr.txt"));
  REQUIRE(rendered.size() == 10);
  const std::string universal =
      jsonio::read_file(kGolden + "/table1_universal.txt");
  const std::size_t cut = universal.find(". The length");
  REQUIRE(cut != std::string::npos);
  // h4 mentions recording in California, so the four kept rows are the
  // release, recording, studio, and genre rows in table order.
  CHECK(rendered[3] == universal.substr(0, cut + 1));
}

TEST_CASE("ingest joins tables and hypotheses in both formats") {
  TempDir tmp;
  REQUIRE(run_cli({"ingest", "--tables", kSampleTable, "--hypotheses",
                   kSampleHyps, "--out", tmp.file("a.json")}) == 0);
  const nlohmann::json canonical =
      nlohmann::json::parse(jsonio::read_file(tmp.file("a.json")));
  REQUIRE(canonical.at("pairs").size() == 10);
  CHECK(canonical.at("rejects").empty());
  CHECK(canonical.at("pairs")[0].at("pair_ref") == "T7:h1");
  CHECK(canonical.at("pairs")[3].at("hypothesis").at("label") == "E");

  REQUIRE(run_cli({"ingest", "--tables", kData + "/samples/T7_infotabs.json",
                   "--format", "infotabs", "--hypotheses", kSampleHyps,
                   "--out", tmp.file("b.json")}) == 0);
  const nlohmann::json infotabs =
      nlohmann::json::parse(jsonio::read_file(tmp.file("b.json")));
  CHECK(infotabs.at("pairs") == canonical.at("pairs"));
}

TEST_CASE("export-batches is byte-deterministic and masks the label slot") {
  TempDir tmp;
  const std::vector<std::string> args = {
      "--seed", "11", "export-batches", "--tables", kSampleTable,
      "--hypotheses", kSampleHyps};
  std::vector<std::string> first = args;
  first.insert(first.end(), {"--out", tmp.file("one.jsonl")});
  std::vector<std::string> second = args;
  second.insert(second.end(), {"--out", tmp.file("two.jsonl")});
  REQUIRE(run_cli(first) == 0);
  REQUIRE(run_cli(second) == 0);
  const std::string one = jsonio::read_file(tmp.file("one.jsonl"));
  CHECK(one == jsonio::read_file(tmp.file("two.jsonl")));

  const std::vector<std::string> entries = jsonio::jsonl_lines(one);
  REQUIRE(entries.size() == 10);
  for (const std::string& line : entries) {
    const pet::MaskedBatchEntry entry = pet::masked_batch_from_json(line);
    CHECK(entry.tokens.at(entry.label_mask_position) == "<mask>");
    CHECK(entry.condition == pet::verbalizer_for(entry.gold));
    for (std::size_t p : entry.context_mask_positions) {
      CHECK(p + 1 != entry.label_mask_position);
      CHECK(p != entry.label_mask_position);
      CHECK(p != entry.label_mask_position + 1);
    }
  }
}

TEST_CASE("mask reports the cwwm-to-token fallback per line") {
  TempDir tmp;
  jsonio::write_file_atomic(tmp.file("in.txt"),
                            "pop and pop rock\n. . . . . . .\n");
  REQUIRE(run_cli({"--seed", "9", "mask", "--file", tmp.file("in.txt"),
                   "--out", tmp.file("plans.jsonl")}) == 0);
  const std::vector<std::string> plans = lines_of(tmp.file("plans.jsonl"));
  REQUIRE(plans.size() == 2);
  const nlohmann::json words = nlohmann::json::parse(plans[0]);
  CHECK(words.at("mode") == "cwwm");
  CHECK(words.at("fallback") == false);
  CHECK(words.at("masked_positions").size() >= 1);
  const nlohmann::json punct = nlohmann::json::parse(plans[1]);
  CHECK(punct.at("mode") == "token");
  CHECK(punct.at("fallback") == true);
  CHECK(punct.at("masked_positions").size() == 1);
}

TEST_CASE("a config file supplies the seed and flags still win") {
  TempDir tmp;
  jsonio::write_file_atomic(tmp.file("forge.ini"), "seed=123\n");
  auto mask_with = [&tmp](const std::vector<std::string>& head,
                          const std::string& out) {
    std::vector<std::string> args = head;
    args.insert(args.end(),
                {"mask", "--text", "pop and pop rock", "--out", tmp.file(out)});
    REQUIRE(run_cli(args) == 0);
    return jsonio::read_file(tmp.file(out));
  };
  const std::string by_flag = mask_with({"--seed", "123"}, "flag.jsonl");
  const std::string by_config =
      mask_with({"--config", tmp.file("forge.ini")}, "config.jsonl");
  CHECK(by_config == by_flag);
  const std::string overridden = mask_with(
      {"--config", tmp.file("forge.ini"), "--seed", "7"}, "override.jsonl");
  CHECK(overridden == mask_with({"--seed", "7"}, "seed7.jsonl"));
  CHECK(overridden != by_flag);
}

TEST_CASE("exit codes distinguish usage, parse, and numerical failures") {
  StreamCapture cerr_capture(std::cerr);
  TempDir tmp;
  CHECK(run_cli({"score", "--preds", tmp.file("missing.tsv")}) == 1);

  jsonio::write_file_atomic(tmp.file("bad.tsv"), "id\ttable\ttext\tlabel\n");
  CHECK(run_cli({"ingest", "--tables", kSampleTable, "--hypotheses",
                 tmp.file("bad.tsv")}) == 2);

  CHECK(run_cli({"train-toy", "--instances", "3", "--steps", "8", "--dim", "4",
                 "--lr", "1e30", "--out", tmp.file("sink.json")}) == 3);

  {
    StreamCapture cout_capture(std::cout);
    CHECK(run_cli({}) == 1);             // a subcommand is required
    CHECK(run_cli({"ingest"}) == 1);     // missing required options
    CHECK(run_cli({"--help"}) == 0);
    CHECK(cout_capture.text().find("ingest") != std::string::npos);
  }
}

TEST_CASE("--json-errors emits machine-readable diagnostics on stderr") {
  TempDir tmp;
  std::string captured;
  {
    StreamCapture capture(std::cerr);
    CHECK(run_cli({"--json-errors", "score", "--preds",
                   tmp.file("missing.tsv")}) == 1);
    captured = capture.text();
  }
  const nlohmann::json missing = nlohmann::json::parse(captured);
  CHECK(missing.at("error") == "ValidationError");
  CHECK(missing.at("message").get<std::string>().find("missing.tsv") !=
        std::string::npos);

  jsonio::write_file_atomic(tmp.file("broken.json"), "{\"table_id\": ");
  {
    StreamCapture capture(std::cerr);
    CHECK(run_cli({"--json-errors", "ingest", "--tables",
                   tmp.file("broken.json"), "--hypotheses", kSampleHyps}) == 2);
    captured = capture.text();
  }
  const nlohmann::json parse = nlohmann::json::parse(captured);
  CHECK(parse.at("error") == "ParseError");
  CHECK(parse.contains("offset"));
}

TEST_CASE("probe prompts scored against gold-first predictions hit 100%") {
  StreamCapture cerr_capture(std::cerr);
  TempDir tmp;
  REQUIRE(run_cli({"--seed", "3", "probe-gen", "--tables", kSampleTable,
                   "--hypotheses", kSampleHyps, "--types", "factual",
                   "--all-spans", "--out", tmp.file("prompts.jsonl")}) == 0);
  const std::vector<std::string> prompt_lines =
      lines_of(tmp.file("prompts.jsonl"));
  REQUIRE(prompt_lines.size() > 5);
  std::string predictions;
  for (const std::string& line : prompt_lines) {
    const nlohmann::json prompt = nlohmann::json::parse(line);
    nlohmann::json record;
    record["id"] = prompt.at("id");
    record["ranked"] = {prompt.at("gold_surfaces")[0]};
    predictions += record.dump() + "\n";
  }
  jsonio::write_file_atomic(tmp.file("preds.jsonl"), predictions);
  REQUIRE(run_cli({"probe-score", "--prompts", tmp.file("prompts.jsonl"),
                   "--predictions", tmp.file("preds.jsonl"), "--out",
                   tmp.file("scores.csv")}) == 0);
  const std::vector<std::string> rows = lines_of(tmp.file("scores.csv"));
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == "name,top1_pct,top5_pct,total");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].find(",100.00,100.00,") != std::string::npos);
  }
}

TEST_CASE("perturb emits one record per pair with drops explained") {
  StreamCapture cerr_capture(std::cerr);
  TempDir tmp;
  REQUIRE(run_cli({"--seed", "5", "perturb", "--tables", kSampleTable,
                   "--hypotheses", kSampleHyps, "--kinds", "location",
                   "--gazetteers", kData + "/gazetteers", "--out",
                   tmp.file("records.jsonl")}) == 0);
  const std::vector<std::string> records = lines_of(tmp.file("records.jsonl"));
  REQUIRE(records.size() == 10);
  bool saw_h4 = false, saw_drop = false;
  for (const std::string& line : records) {
    const nlohmann::json record = nlohmann::json::parse(line);
    if (record.at("pair_ref") == "T7:h4") {
      saw_h4 = true;
      CHECK(record.at("perturbed_text") ==
            "Breakfast in America is recorded in Florida.");
      CHECK(record.at("new_label") == "C");
    }
    if (record.at("pair_ref") == "T7:h8") {
      saw_drop = true;
      CHECK(record.at("new_label") == "Dropped");
      CHECK(record.at("drop_reason") ==
            "location: no replaceable location span");
    }
  }
  CHECK(saw_h4);
  CHECK(saw_drop);
}

TEST_CASE("score reports accuracy, confusion, and consistency") {
  TempDir tmp;
  jsonio::write_file_atomic(tmp.file("gold.tsv"),
                            "a\tE\nb\tN\nc\tC\nd\tE\n");
  jsonio::write_file_atomic(tmp.file("preds.tsv"),
                            "a\tE\nb\tN\nc\tE\nd\tC\n");
  REQUIRE(run_cli({"score", "--preds", tmp.file("preds.tsv"), "--gold",
                   tmp.file("gold.tsv"), "--confusion", "--out",
                   tmp.file("score.txt")}) == 0);
  CHECK(jsonio::read_file(tmp.file("score.txt")) ==
        "accuracy\t0.500000\n"
        "gold\\pred\tE\tN\tC\n"
        "E\t1\t0\t1\n"
        "N\t0\t1\t0\n"
        "C\t1\t0\t0\n");

  REQUIRE(run_cli({"score", "--preds", tmp.file("preds.tsv"), "--gold",
                   tmp.file("gold.tsv"), "--two-label", "--out",
                   tmp.file("two.txt")}) == 0);
  CHECK(jsonio::read_file(tmp.file("two.txt")) ==
        "two_label_accuracy\t0.333333\n");

  REQUIRE(run_cli({"score", "--preds", tmp.file("preds.tsv"), "--preds-b",
                   tmp.file("gold.tsv"), "--consistency", "--out",
                   tmp.file("cons.txt")}) == 0);
  const std::string consistency = jsonio::read_file(tmp.file("cons.txt"));
  CHECK(consistency.substr(0, consistency.find('\n')) == "A\\B\tE\tN\tC");
}

TEST_CASE("score maps external logits through verbalizer ids") {
  StreamCapture cerr_capture(std::cerr);
  TempDir tmp;
  pet::MaskedBatchEntry hit;
  hit.id = "T7:h1";
  hit.tokens = {"a", "?", "<mask>", ",", "b"};
  hit.label_mask_position = 2;
  hit.gold = corpus::Label::E;
  pet::MaskedBatchEntry miss = hit;
  miss.id = "T7:h2";
  miss.gold = corpus::Label::C;
  jsonio::write_file_atomic(tmp.file("batches.jsonl"),
                            pet::masked_batch_to_json(hit) + "\n" +
                                pet::masked_batch_to_json(miss) + "\n");
  pet::LogitRecord r1;
  r1.id = "T7:h1";
  r1.rows.resize(1, 4);
  r1.rows << 3, 0, 0, 0;
  pet::LogitRecord r2 = r1;
  r2.id = "T7:h2";
  jsonio::write_file_atomic(tmp.file("logits.jsonl"),
                            pet::logit_record_to_json(r1) + "\n" +
                                pet::logit_record_to_json(r2) + "\n");
  REQUIRE(run_cli({"score", "--batches", tmp.file("batches.jsonl"),
                   "--logits", tmp.file("logits.jsonl"), "--verbalizers",
                   "0,1,2", "--out", tmp.file("preds.tsv")}) == 0);
  CHECK(jsonio::read_file(tmp.file("preds.tsv")) == "T7:h1\tE\nT7:h2\tE\n");
  CHECK(cerr_capture.text().find("accuracy 0.500000 over 2") !=
        std::string::npos);
}

TEST_CASE("report renders a sorted table with the random baseline") {
  TempDir tmp;
  jsonio::write_file_atomic(tmp.file("in.tsv"),
                            "model-b\t71.5\nmodel-a\t55.13\n");
  REQUIRE(run_cli({"report", "--input", tmp.file("in.tsv"),
                   "--baseline-random", "--out", tmp.file("report.csv")}) == 0);
  CHECK(jsonio::read_file(tmp.file("report.csv")) ==
        "name,accuracy\n"
        "random,33.33\n"
        "model-a,55.13\n"
        "model-b,71.50\n");
}

TEST_CASE("train-toy writes a summary whose loss decreases") {
  TempDir tmp;
  REQUIRE(run_cli({"--seed", "1", "train-toy", "--instances", "30", "--steps",
                   "25", "--dim", "8", "--out", tmp.file("summary.json"),
                   "--trace-out", tmp.file("trace.json")}) == 0);
  const nlohmann::json summary =
      nlohmann::json::parse(jsonio::read_file(tmp.file("summary.json")));
  CHECK(summary.at("final_loss").get<double>() <
        summary.at("initial_loss").get<double>());
  CHECK(summary.at("accuracy").get<double>() >= 0.0);
  CHECK(summary.at("accuracy").get<double>() <= 1.0);
  const nlohmann::json trace =
      nlohmann::json::parse(jsonio::read_file(tmp.file("trace.json")));
  CHECK(trace.at("loss_trace").size() == 25);
}

}  // TEST_SUITE
