#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "forge/annotate.hpp"
#include "forge/corpus.hpp"

namespace forge::perturb {

enum class Kind { Character, Location, Name, Number, Negation, Paraphrase };

std::string kind_name(Kind kind);
Kind parse_kind(std::string_view s);

// One replaced byte span, positions relative to the text the op received.
struct Replacement {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string original;
  std::string replacement;
};

struct OpTrace {
  Kind kind = Kind::Character;
  std::vector<Replacement> replacements;
  bool no_op = false;
};

struct OpResult {
  std::string text;
  OpTrace trace;
};

// n_ops seeded character edits (insert/swap/delete/substitute, word edges
// preserved) on words of length >= 3 outside entity and number spans.
OpResult perturb_character(std::string_view text, std::uint64_t seed,
                           int n_ops, const annotate::Gazetteer& gazetteer);

// Replaces every city/country/nationality span with its mapped counterpart
// of the same kind. No article repair by design.
OpResult perturb_location(std::string_view text,
                          const annotate::Gazetteer& gazetteer);

// Replaces every person-name span with a sampled full name from the list;
// a trailing possessive clitic stays in place.
OpResult perturb_name(std::string_view text,
                      const std::vector<std::string>& name_list,
                      std::uint64_t seed, const annotate::Gazetteer& gazetteer);

// Replaces one uniformly chosen digit token with a different random integer
// in [1, 3999]; day-of-month tokens next to a month word stay in [1, 28].
OpResult perturb_number(std::string_view text, std::uint64_t seed);

// Inserts "not" after the first auxiliary, or applies do-support to the
// first main verb. Already-negated text raises NoOpError.
OpResult perturb_negation(std::string_view text);

class ParaphraseProvider {
 public:
  virtual ~ParaphraseProvider() = default;

  // Paraphrase for this hypothesis, or nullopt when none applies. `current`
  // is the text after any earlier ops in the composition.
  virtual std::optional<std::string> paraphrase(std::string_view hyp_id,
                                                std::string_view current) const = 0;
  virtual std::string name() const = 0;

  // True when the provider's output paraphrases the ORIGINAL hypothesis
  // (e.g. a precomputed file) so earlier replacements must be re-applied.
  virtual bool keyed_on_original() const { return false; }
};

// Returns the input unchanged; the op is marked no_op.
class IdentityParaphraser : public ParaphraseProvider {
 public:
  std::optional<std::string> paraphrase(std::string_view,
                                        std::string_view current) const override {
    return std::string(current);
  }
  std::string name() const override { return "identity"; }
};

// TSV hyp_id<TAB>paraphrase; misses yield nullopt.
class FileMapParaphraser : public ParaphraseProvider {
 public:
  static FileMapParaphraser load(std::string_view tsv);
  static FileMapParaphraser load_file(const std::filesystem::path& path);

  std::optional<std::string> paraphrase(std::string_view hyp_id,
                                        std::string_view current) const override;
  std::string name() const override { return "file"; }
  bool keyed_on_original() const override { return true; }

  std::size_t size() const { return map_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> map_;
};

// Fronts the trailing prepositional phrase: "X was recorded in 1979." ->
// "In 1979, X was recorded."
class FrontingParaphraser : public ParaphraseProvider {
 public:
  std::optional<std::string> paraphrase(std::string_view hyp_id,
                                        std::string_view current) const override;
  std::string name() const override { return "fronting"; }
};

struct TransitionRule {
  // The sources are silent on negating a contradiction; dropping is the
  // default and entailment the optional reading.
  bool negation_c_to_e = false;
};

// New label after one perturbation kind; nullopt means the pair is dropped.
std::optional<corpus::Label> transition_label(corpus::Label label, Kind kind,
                                              const TransitionRule& rules);

struct Providers {
  const annotate::Gazetteer* gazetteer = nullptr;
  std::vector<std::string> name_list;
  const ParaphraseProvider* paraphraser = nullptr;
  TransitionRule rules;
  int character_ops = 3;
};

struct PerturbationRecord {
  std::string pair_ref;
  std::string original_text;
  std::string perturbed_text;
  std::vector<OpTrace> ops;
  corpus::Label original_label = corpus::Label::E;
  std::optional<corpus::Label> new_label;  // empty while dropped
  std::uint64_t seed = 0;
  bool dropped = false;
  std::string drop_reason;
};

// Applies the kinds left to right on the text while folding the label
// transitions. Any NoOpError or a Drop transition drops the record, as does
// a composition whose every op was a no-op.
PerturbationRecord compose(const corpus::Pair& pair,
                           const std::vector<Kind>& kinds, std::uint64_t seed,
                           const Providers& providers);

std::string record_to_json(const PerturbationRecord& record);

}  // namespace forge::perturb
