#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "forge/annotate.hpp"
#include "forge/corpus.hpp"

namespace forge::pet {

inline constexpr std::string_view kMaskToken = "<mask>";

// Verbalizers in label order E, N, C.
inline const std::array<std::string, 3> kVerbalizers = {"Yes", "Maybe", "No"};
const std::string& verbalizer_for(corpus::Label label);

struct ClozeInstance {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t label_mask_position = 0;
  std::array<std::string, 3> verbalizers = kVerbalizers;
  corpus::Label gold = corpus::Label::E;
};

// <premise tokens> ? <mask> , <hypothesis tokens>. Both texts must
// tokenize to at least one token.
ClozeInstance build_pattern(std::string_view premise_text,
                            std::string_view hypothesis_text,
                            corpus::Label gold, std::string id = {});

// Positions that must never be masked in an instance: the label slot and the
// two pattern-skeleton punctuation tokens around it.
std::set<std::size_t> pattern_protected_positions(const ClozeInstance& inst);

struct MaskPlan {
  std::vector<std::size_t> masked_positions;           // sorted
  std::vector<std::vector<std::size_t>> grouping;      // whole-word groups
  std::uint64_t seed = 0;
  double target_ratio = 0.0;
};

// Uniform sample, without replacement, of exactly
// round(ratio * (n_tokens - |protected|)) unprotected positions.
MaskPlan sample_token_masks(std::size_t n_tokens, double ratio,
                            std::uint64_t seed,
                            const std::set<std::size_t>& protected_positions);

// POS classes whose words participate in whole-word masking.
bool cwwm_eligible(annotate::Pos pos);

// Conditional whole-word masking: build the eligible word set, walk it in a
// seeded random order, and mask every occurrence of each picked word until
// at least ceil(ratio * n_tokens) positions are covered. Raises
// FallbackToTokenMasking when no eligible word exists or the eligible words
// cannot reach the target.
MaskPlan sample_cwwm_masks(const std::vector<std::string>& tokens,
                           const std::vector<annotate::TokenAnnotation>& annotations,
                           double ratio, std::uint64_t seed);

struct VerbalizerIds {
  int yes = -1;
  int maybe = -1;
  int no = -1;

  int for_label(corpus::Label label) const;
  std::array<int, 3> all() const { return {yes, maybe, no}; }
};

// -log p[gold verbalizer] - sum over wrong verbalizers of log(1 - p), with p
// softmaxed over the full vocabulary row. Probabilities are clamped to
// <= 1 - 1e-12 before log(1 - p). Non-finite logits raise NumericalError.
double decoupled_label_loss(const Eigen::VectorXd& logits,
                            const VerbalizerIds& verbalizers,
                            corpus::Label gold);

// Mean over masked positions of -log p[original] when the substituted label
// was correct, -log(1 - p[original]) otherwise. rows: one logit row per
// masked position. Zero positions raise ValidationError.
double label_conditioned_mlm_loss(const Eigen::MatrixXd& rows,
                                  const std::vector<int>& original_ids,
                                  bool condition_correct);

// Argmax over the three verbalizer logits; exact ties resolve E > N > C.
corpus::Label predict_from_logits(const Eigen::VectorXd& logits,
                                  const VerbalizerIds& verbalizers);

struct ToyScorerConfig {
  std::vector<std::string> vocab;
  int embed_dim = 16;
  double learning_rate = 0.5;
  int steps = 500;
  std::uint64_t seed = 0;
  double mask_ratio = 0.15;
  int local_window = 3;
  double mlm_weight = 1.0;
};

// Bag-of-embeddings cloze scorer. Per queried position the feature is
// [mean embedding of unmasked window neighbors ;
//  premise bag (*) hypothesis bag ;
//  embedding of the token sitting in the label slot, zero when masked]
// followed by a single linear layer to |V| logits. The interaction bags are
// sums scaled by 1/sqrt(count), keeping their product large enough for the
// label signal to train at the default learning rate yet small enough to
// stay stable there.
class ToyScorer {
 public:
  explicit ToyScorer(ToyScorerConfig config);

  const ToyScorerConfig& config() const { return config_; }
  int vocab_id(std::string_view token) const;  // -1 when absent
  int vocab_size() const { return static_cast<int>(config_.vocab.size()); }
  VerbalizerIds verbalizer_ids() const;

  Eigen::MatrixXd& embeddings() { return embeddings_; }
  Eigen::MatrixXd& head() { return head_; }
  Eigen::VectorXd& bias() { return bias_; }
  const Eigen::MatrixXd& embeddings() const { return embeddings_; }
  const Eigen::MatrixXd& head() const { return head_; }
  const Eigen::VectorXd& bias() const { return bias_; }

  std::vector<int> token_ids(const ClozeInstance& inst) const;

  // Logit rows for the queried positions. `masked` positions are excluded
  // from every bag; `condition_id` >= 0 places that token in the label slot.
  Eigen::MatrixXd forward(const std::vector<int>& ids, std::size_t label_pos,
                          const std::set<std::size_t>& masked, int condition_id,
                          const std::vector<std::size_t>& queries) const;

 private:
  ToyScorerConfig config_;
  std::map<std::string, int, std::less<>> index_;
  Eigen::MatrixXd embeddings_;  // |V| x d
  Eigen::MatrixXd head_;        // |V| x 3d
  Eigen::VectorXd bias_;        // |V|
};

struct ToyGradients {
  Eigen::MatrixXd d_embeddings;
  Eigen::MatrixXd d_head;
  Eigen::VectorXd d_bias;
};

// Combined objective over the batch: decoupled label loss at the label slot
// plus label-conditioned MLM terms (gold condition as correct, each wrong
// verbalizer averaged as incorrect), mean over instances.
double toy_total_loss(const ToyScorer& scorer,
                      const std::vector<ClozeInstance>& instances);

ToyGradients toy_gradients(const ToyScorer& scorer,
                           const std::vector<ClozeInstance>& instances,
                           double* loss_out = nullptr);

struct TrainStats {
  std::vector<double> loss_trace;  // loss before each step
};

// Full-batch gradient descent, deterministic for a given config.
TrainStats toy_train(ToyScorer& scorer,
                     const std::vector<ClozeInstance>& instances);

corpus::Label predict_label(const ToyScorer& scorer,
                            const ClozeInstance& instance);

// Desk-scale rule dataset: the hypothesis repeats the premise value (E),
// contradicts it with a different value (C), or talks about a different
// attribute entirely (N). Balanced across labels.
std::vector<ClozeInstance> make_rule_dataset(int instances, std::uint64_t seed);
std::vector<std::string> rule_dataset_vocab();

// JSONL schemas for batch export and externally computed logits.
struct MaskedBatchEntry {
  std::string id;
  std::vector<std::string> tokens;
  std::size_t label_mask_position = 0;
  std::vector<std::size_t> context_mask_positions;
  std::array<std::string, 3> verbalizers = kVerbalizers;
  corpus::Label gold = corpus::Label::E;
  std::string condition;  // token in the label slot; "" = masked
};

std::string masked_batch_to_json(const MaskedBatchEntry& entry);
MaskedBatchEntry masked_batch_from_json(std::string_view line);

struct LogitRecord {
  std::string id;
  // Row 0 is the label position; subsequent rows follow
  // context_mask_positions in ascending order.
  Eigen::MatrixXd rows;
};

std::string logit_record_to_json(const LogitRecord& record);
LogitRecord logit_record_from_json(std::string_view line);

}  // namespace forge::pet
