#include "forge/pet.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "forge/errors.hpp"
#include "forge/rng.hpp"
#include "forge/text.hpp"

namespace forge::pet {

namespace {

constexpr double kProbClamp = 1.0 - 1e-12;

void check_finite(const Eigen::VectorXd& v, const char* where) {
  if (!v.allFinite()) {
    throw NumericalError(std::string(where) + ": non-finite logits");
  }
}

// Stable log-softmax over one row.
void log_softmax(const Eigen::VectorXd& z, Eigen::VectorXd& logp,
                 Eigen::VectorXd& p) {
  const double m = z.maxCoeff();
  Eigen::VectorXd shifted = z.array() - m;
  const double lse = std::log(shifted.array().exp().sum());
  logp = shifted.array() - lse;
  p = logp.array().exp();
}

double wrong_term(double p) {
  if (p >= kProbClamp) p = kProbClamp;
  return -std::log1p(-p);
}

}  // namespace

const std::string& verbalizer_for(corpus::Label label) {
  return kVerbalizers[static_cast<std::size_t>(label)];
}

ClozeInstance build_pattern(std::string_view premise_text,
                            std::string_view hypothesis_text,
                            corpus::Label gold, std::string id) {
  std::vector<std::string> premise_tokens =
      text::token_texts(text::tokenize(premise_text));
  std::vector<std::string> hyp_tokens =
      text::token_texts(text::tokenize(hypothesis_text));
  if (premise_tokens.empty()) {
    throw ValidationError("build_pattern: empty premise");
  }
  if (hyp_tokens.empty()) {
    throw ValidationError("build_pattern: empty hypothesis");
  }
  ClozeInstance inst;
  inst.id = std::move(id);
  inst.gold = gold;
  inst.tokens = std::move(premise_tokens);
  inst.tokens.push_back("?");
  inst.label_mask_position = inst.tokens.size();
  inst.tokens.push_back(std::string(kMaskToken));
  inst.tokens.push_back(",");
  inst.tokens.insert(inst.tokens.end(), hyp_tokens.begin(), hyp_tokens.end());
  return inst;
}

std::set<std::size_t> pattern_protected_positions(const ClozeInstance& inst) {
  return {inst.label_mask_position - 1, inst.label_mask_position,
          inst.label_mask_position + 1};
}

MaskPlan sample_token_masks(std::size_t n_tokens, double ratio,
                            std::uint64_t seed,
                            const std::set<std::size_t>& protected_positions) {
  if (n_tokens == 0) throw ValidationError("sample_token_masks: no tokens");
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("sample_token_masks: ratio must be in (0, 1)");
  }
  std::vector<std::size_t> candidates;
  candidates.reserve(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) {
    if (protected_positions.count(i) == 0) candidates.push_back(i);
  }
  const auto count = static_cast<std::size_t>(
      std::llround(ratio * static_cast<double>(candidates.size())));
  if (count == 0) {
    throw ValidationError("sample_token_masks: ratio " + std::to_string(ratio) +
                          " rounds to zero positions");
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.index(candidates.size() - i);
    std::swap(candidates[i], candidates[j]);
  }
  MaskPlan plan;
  plan.seed = seed;
  plan.target_ratio = ratio;
  plan.masked_positions.assign(candidates.begin(), candidates.begin() + count);
  std::sort(plan.masked_positions.begin(), plan.masked_positions.end());
  for (std::size_t p : plan.masked_positions) {
    plan.grouping.push_back({p});
  }
  return plan;
}

bool cwwm_eligible(annotate::Pos pos) {
  using annotate::Pos;
  switch (pos) {
    case Pos::ADJ:
    case Pos::ADV:
    case Pos::NOUN:
    case Pos::VERB:
    case Pos::PROPN:
    case Pos::ADP:
    case Pos::NUM:
    case Pos::CCONJ:
    case Pos::SCONJ:
      return true;
    default:
      return false;
  }
}

MaskPlan sample_cwwm_masks(const std::vector<std::string>& tokens,
                           const std::vector<annotate::TokenAnnotation>& annotations,
                           double ratio, std::uint64_t seed) {
  if (tokens.size() != annotations.size()) {
    throw ValidationError("sample_cwwm_masks: annotation length mismatch");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("sample_cwwm_masks: ratio must be in (0, 1)");
  }
  const std::size_t n = tokens.size();
  // Word set in first-eligible-occurrence order; each word owns every
  // position where its surface form appears.
  std::vector<std::string> words;
  std::map<std::string, std::vector<std::size_t>> positions;
  for (std::size_t i = 0; i < n; ++i) {
    if (!cwwm_eligible(annotations[i].pos)) continue;
    if (positions.count(tokens[i]) == 0) words.push_back(tokens[i]);
    positions[tokens[i]];  // ensure the key exists
  }
  if (words.empty()) {
    throw FallbackToTokenMasking("no whole-word-maskable tokens");
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto it = positions.find(tokens[i]);
    if (it != positions.end()) it->second.push_back(i);
  }
  const auto target = static_cast<std::size_t>(
      std::ceil(ratio * static_cast<double>(n) - 1e-9));
  Rng rng(seed);
  rng.shuffle(words);
  MaskPlan plan;
  plan.seed = seed;
  plan.target_ratio = ratio;
  std::size_t covered = 0;
  for (const std::string& w : words) {
    if (covered >= target) break;
    const std::vector<std::size_t>& group = positions[w];
    plan.grouping.push_back(group);
    covered += group.size();
  }
  if (covered < target) {
    throw FallbackToTokenMasking("eligible words cover only " +
                                 std::to_string(covered) + " of " +
                                 std::to_string(target) + " positions");
  }
  for (const auto& group : plan.grouping) {
    plan.masked_positions.insert(plan.masked_positions.end(), group.begin(),
                                 group.end());
  }
  std::sort(plan.masked_positions.begin(), plan.masked_positions.end());
  return plan;
}

int VerbalizerIds::for_label(corpus::Label label) const {
  switch (label) {
    case corpus::Label::E: return yes;
    case corpus::Label::N: return maybe;
    case corpus::Label::C: return no;
  }
  return -1;
}

double decoupled_label_loss(const Eigen::VectorXd& logits,
                            const VerbalizerIds& verbalizers,
                            corpus::Label gold) {
  check_finite(logits, "decoupled_label_loss");
  const std::array<int, 3> ids = verbalizers.all();
  for (int id : ids) {
    if (id < 0 || id >= logits.size()) {
      throw ValidationError("decoupled_label_loss: verbalizer id out of range");
    }
  }
  if (ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2]) {
    throw ValidationError("decoupled_label_loss: verbalizer ids not distinct");
  }
  Eigen::VectorXd logp, p;
  log_softmax(logits, logp, p);
  const int gold_id = verbalizers.for_label(gold);
  double loss = -logp(gold_id);
  for (int id : ids) {
    if (id == gold_id) continue;
    loss += wrong_term(p(id));
  }
  return loss;
}

double label_conditioned_mlm_loss(const Eigen::MatrixXd& rows,
                                  const std::vector<int>& original_ids,
                                  bool condition_correct) {
  if (rows.rows() == 0 ||
      static_cast<std::size_t>(rows.rows()) != original_ids.size()) {
    throw ValidationError(
        "label_conditioned_mlm_loss: need one logit row per masked position");
  }
  double total = 0.0;
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const int orig = original_ids[static_cast<std::size_t>(r)];
    if (orig < 0 || orig >= rows.cols()) {
      throw ValidationError("label_conditioned_mlm_loss: original id " +
                            std::to_string(orig) + " out of range");
    }
    Eigen::VectorXd z = rows.row(r);
    check_finite(z, "label_conditioned_mlm_loss");
    Eigen::VectorXd logp, p;
    log_softmax(z, logp, p);
    total += condition_correct ? -logp(orig) : wrong_term(p(orig));
  }
  return total / static_cast<double>(rows.rows());
}

corpus::Label predict_from_logits(const Eigen::VectorXd& logits,
                                  const VerbalizerIds& verbalizers) {
  check_finite(logits, "predict_from_logits");
  corpus::Label best = corpus::Label::E;
  double best_logit = logits(verbalizers.yes);
  if (logits(verbalizers.maybe) > best_logit) {
    best = corpus::Label::N;
    best_logit = logits(verbalizers.maybe);
  }
  if (logits(verbalizers.no) > best_logit) {
    best = corpus::Label::C;
  }
  return best;
}

ToyScorer::ToyScorer(ToyScorerConfig config) : config_(std::move(config)) {
  if (config_.embed_dim < 1) {
    throw ValidationError("toy scorer: embed_dim must be >= 1");
  }
  if (!(config_.learning_rate > 0.0)) {
    throw ValidationError("toy scorer: learning_rate must be > 0");
  }
  if (config_.vocab.empty()) {
    throw ValidationError("toy scorer: empty vocabulary");
  }
  for (std::size_t i = 0; i < config_.vocab.size(); ++i) {
    if (!index_.emplace(config_.vocab[i], static_cast<int>(i)).second) {
      throw ValidationError("toy scorer: duplicate vocab token '" +
                            config_.vocab[i] + "'");
    }
  }
  for (const std::string& v : kVerbalizers) {
    if (index_.count(v) == 0) {
      throw ValidationError("toy scorer: vocabulary missing verbalizer '" + v +
                            "'");
    }
  }
  const int V = vocab_size();
  const int d = config_.embed_dim;
  embeddings_.resize(V, d);
  head_.resize(V, 3 * d);
  bias_ = Eigen::VectorXd::Zero(V);
  Rng rng(Rng::mix(config_.seed, "toy-init"));
  auto fill = [&rng](Eigen::MatrixXd& m, double scale) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        m(r, c) = (rng.real() * 2.0 - 1.0) * scale;
      }
    }
  };
  fill(embeddings_, 0.5);
  fill(head_, 0.5 / std::sqrt(static_cast<double>(d)));
}

int ToyScorer::vocab_id(std::string_view token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

VerbalizerIds ToyScorer::verbalizer_ids() const {
  return VerbalizerIds{vocab_id(kVerbalizers[0]), vocab_id(kVerbalizers[1]),
                       vocab_id(kVerbalizers[2])};
}

std::vector<int> ToyScorer::token_ids(const ClozeInstance& inst) const {
  std::vector<int> ids;
  ids.reserve(inst.tokens.size());
  for (const std::string& t : inst.tokens) {
    const int id = vocab_id(t);
    if (id < 0) {
      throw ValidationError("toy scorer: token '" + t +
                            "' not in vocabulary");
    }
    ids.push_back(id);
  }
  return ids;
}

namespace {

struct BagState {
  Eigen::VectorXd bag_premise;
  Eigen::VectorXd bag_hypothesis;
  Eigen::VectorXd cond;
  std::vector<std::size_t> premise_members;
  std::vector<std::size_t> hyp_members;
};

struct QueryState {
  Eigen::VectorXd local;
  std::vector<std::size_t> local_members;
  Eigen::VectorXd h;
  Eigen::VectorXd p;
  Eigen::VectorXd logp;
};

// One scoring pass over an instance: shared bags plus per-query features.
class Pass {
 public:
  Pass(const ToyScorer& scorer, const std::vector<int>& ids,
       std::size_t label_pos, const std::set<std::size_t>& masked,
       int condition_id)
      : scorer_(scorer),
        ids_(ids),
        label_pos_(label_pos),
        masked_(masked),
        condition_id_(condition_id) {
    const int d = scorer.config().embed_dim;
    const std::size_t n = ids.size();
    bags_.bag_premise = Eigen::VectorXd::Zero(d);
    bags_.bag_hypothesis = Eigen::VectorXd::Zero(d);
    for (std::size_t j = 0; j + 1 < label_pos_ && j < n; ++j) {
      if (masked_.count(j)) continue;
      bags_.premise_members.push_back(j);
      bags_.bag_premise += embedding(j);
    }
    for (std::size_t j = label_pos_ + 2; j < n; ++j) {
      if (masked_.count(j)) continue;
      bags_.hyp_members.push_back(j);
      bags_.bag_hypothesis += embedding(j);
    }
    if (!bags_.premise_members.empty()) {
      bags_.bag_premise /=
          std::sqrt(static_cast<double>(bags_.premise_members.size()));
    }
    if (!bags_.hyp_members.empty()) {
      bags_.bag_hypothesis /=
          std::sqrt(static_cast<double>(bags_.hyp_members.size()));
    }
    if (condition_id_ >= 0) {
      bags_.cond = scorer_.embeddings().row(condition_id_).transpose();
    } else {
      bags_.cond = Eigen::VectorXd::Zero(d);
    }
  }

  QueryState query(std::size_t q) const {
    const int d = scorer_.config().embed_dim;
    const int w = scorer_.config().local_window;
    const std::size_t n = ids_.size();
    QueryState st;
    st.local = Eigen::VectorXd::Zero(d);
    const std::size_t lo = q >= static_cast<std::size_t>(w)
                               ? q - static_cast<std::size_t>(w)
                               : 0;
    const std::size_t hi = std::min(n - 1, q + static_cast<std::size_t>(w));
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j == q || masked_.count(j)) continue;
      st.local_members.push_back(j);
      st.local += embedding(j);
    }
    if (!st.local_members.empty()) {
      st.local /= static_cast<double>(st.local_members.size());
    }
    st.h.resize(3 * d);
    st.h << st.local,
        bags_.bag_premise.cwiseProduct(bags_.bag_hypothesis), bags_.cond;
    Eigen::VectorXd z = scorer_.head() * st.h + scorer_.bias();
    log_softmax(z, st.logp, st.p);
    return st;
  }

  // Routes dL/dz for one query back onto the parameters.
  void backward(std::size_t /*query*/, const QueryState& st,
                const Eigen::VectorXd& dz, ToyGradients& grads) const {
    const int d = scorer_.config().embed_dim;
    grads.d_bias += dz;
    grads.d_head += dz * st.h.transpose();
    Eigen::VectorXd dh = scorer_.head().transpose() * dz;
    const Eigen::VectorXd dlocal = dh.segment(0, d);
    const Eigen::VectorXd dinter = dh.segment(d, d);
    const Eigen::VectorXd dcond = dh.segment(2 * d, d);
    if (!st.local_members.empty()) {
      const Eigen::VectorXd share =
          dlocal / static_cast<double>(st.local_members.size());
      for (std::size_t j : st.local_members) {
        grads.d_embeddings.row(ids_at(j)) += share.transpose();
      }
    }
    if (!bags_.premise_members.empty()) {
      const Eigen::VectorXd dbag =
          dinter.cwiseProduct(bags_.bag_hypothesis) /
          std::sqrt(static_cast<double>(bags_.premise_members.size()));
      for (std::size_t j : bags_.premise_members) {
        grads.d_embeddings.row(ids_at(j)) += dbag.transpose();
      }
    }
    if (!bags_.hyp_members.empty()) {
      const Eigen::VectorXd dbag =
          dinter.cwiseProduct(bags_.bag_premise) /
          std::sqrt(static_cast<double>(bags_.hyp_members.size()));
      for (std::size_t j : bags_.hyp_members) {
        grads.d_embeddings.row(ids_at(j)) += dbag.transpose();
      }
    }
    if (condition_id_ >= 0) {
      grads.d_embeddings.row(condition_id_) += dcond.transpose();
    }
  }

 private:
  Eigen::VectorXd embedding(std::size_t j) const {
    return scorer_.embeddings().row(ids_at(j)).transpose();
  }

  int ids_at(std::size_t j) const {
    return j == label_pos_ && condition_id_ >= 0 ? condition_id_ : ids_[j];
  }

  const ToyScorer& scorer_;
  const std::vector<int>& ids_;
  std::size_t label_pos_;
  const std::set<std::size_t>& masked_;
  int condition_id_;
  BagState bags_;
};

// dL/dz for -log p[gold] - sum_wrong log(1 - p[w]) at one row.
Eigen::VectorXd decoupled_dz(const Eigen::VectorXd& p,
                             const std::array<int, 3>& ids, int gold_id) {
  Eigen::VectorXd dz = p;
  dz(gold_id) -= 1.0;
  for (int w : ids) {
    if (w == gold_id) continue;
    const double pw = p(w);
    if (pw >= kProbClamp) continue;  // clamped region: term is constant
    const double coef = pw / (1.0 - pw);
    dz -= coef * p;
    dz(w) += coef;
  }
  return dz;
}

Eigen::VectorXd mlm_dz(const Eigen::VectorXd& p, int orig, bool correct) {
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(p.size());
  if (correct) {
    dz = p;
    dz(orig) -= 1.0;
    return dz;
  }
  const double po = p(orig);
  if (po >= kProbClamp) return dz;
  const double coef = po / (1.0 - po);
  dz = -coef * p;
  dz(orig) += coef;
  return dz;
}

// Forward (and optionally backward) for the whole batch; returns mean loss.
double accumulate(const ToyScorer& scorer,
                  const std::vector<ClozeInstance>& instances,
                  ToyGradients* grads) {
  if (instances.empty()) {
    throw ValidationError("toy scorer: empty instance batch");
  }
  const VerbalizerIds verbs = scorer.verbalizer_ids();
  const std::array<int, 3> verb_array = verbs.all();
  const double inv_n = 1.0 / static_cast<double>(instances.size());
  double total = 0.0;
  for (const ClozeInstance& inst : instances) {
    const std::vector<int> ids = scorer.token_ids(inst);
    const std::size_t lp = inst.label_mask_position;
    // Label pass: slot masked, full context visible.
    {
      const std::set<std::size_t> masked = {lp};
      Pass pass(scorer, ids, lp, masked, -1);
      QueryState st = pass.query(lp);
      const int gold_id = verbs.for_label(inst.gold);
      total += inv_n * (-st.logp(gold_id));
      for (int w : verb_array) {
        if (w != gold_id) total += inv_n * wrong_term(st.p(w));
      }
      if (grads != nullptr) {
        Eigen::VectorXd dz = inv_n * decoupled_dz(st.p, verb_array, gold_id);
        pass.backward(lp, st, dz, *grads);
      }
    }
    // Conditioned MLM passes over a per-instance context plan.
    MaskPlan plan;
    try {
      plan = sample_token_masks(ids.size(), scorer.config().mask_ratio,
                                Rng::mix(scorer.config().seed, inst.id, "plan"),
                                pattern_protected_positions(inst));
    } catch (const ValidationError&) {
      continue;  // instance too short to mask context tokens
    }
    const std::set<std::size_t> masked(plan.masked_positions.begin(),
                                       plan.masked_positions.end());
    const double inv_p = 1.0 / static_cast<double>(plan.masked_positions.size());
    for (corpus::Label cond :
         {corpus::Label::E, corpus::Label::N, corpus::Label::C}) {
      const bool correct = cond == inst.gold;
      const double weight =
          scorer.config().mlm_weight * (correct ? 1.0 : 0.5) * inv_n;
      Pass pass(scorer, ids, lp, masked, verbs.for_label(cond));
      for (std::size_t q : plan.masked_positions) {
        QueryState st = pass.query(q);
        const int orig = ids[q];
        total += weight * inv_p *
                 (correct ? -st.logp(orig) : wrong_term(st.p(orig)));
        if (grads != nullptr) {
          Eigen::VectorXd dz =
              weight * inv_p * mlm_dz(st.p, orig, correct);
          pass.backward(q, st, dz, *grads);
        }
      }
    }
  }
  return total;
}

}  // namespace

Eigen::MatrixXd ToyScorer::forward(const std::vector<int>& ids,
                                   std::size_t label_pos,
                                   const std::set<std::size_t>& masked,
                                   int condition_id,
                                   const std::vector<std::size_t>& queries) const {
  Pass pass(*this, ids, label_pos, masked, condition_id);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(queries.size()), vocab_size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    QueryState st = pass.query(queries[i]);
    out.row(static_cast<Eigen::Index>(i)) =
        (head_ * st.h + bias_).transpose();
  }
  return out;
}

double toy_total_loss(const ToyScorer& scorer,
                      const std::vector<ClozeInstance>& instances) {
  return accumulate(scorer, instances, nullptr);
}

ToyGradients toy_gradients(const ToyScorer& scorer,
                           const std::vector<ClozeInstance>& instances,
                           double* loss_out) {
  ToyGradients grads;
  grads.d_embeddings =
      Eigen::MatrixXd::Zero(scorer.embeddings().rows(), scorer.embeddings().cols());
  grads.d_head = Eigen::MatrixXd::Zero(scorer.head().rows(), scorer.head().cols());
  grads.d_bias = Eigen::VectorXd::Zero(scorer.bias().size());
  const double loss = accumulate(scorer, instances, &grads);
  if (loss_out != nullptr) *loss_out = loss;
  return grads;
}

TrainStats toy_train(ToyScorer& scorer,
                     const std::vector<ClozeInstance>& instances) {
  TrainStats stats;
  const double lr = scorer.config().learning_rate;
  for (int step = 0; step < scorer.config().steps; ++step) {
    double loss = 0.0;
    ToyGradients grads = toy_gradients(scorer, instances, &loss);
    if (!std::isfinite(loss)) {
      throw NumericalError("toy_train: loss diverged at step " +
                           std::to_string(step));
    }
    stats.loss_trace.push_back(loss);
    scorer.embeddings() -= lr * grads.d_embeddings;
    scorer.head() -= lr * grads.d_head;
    scorer.bias() -= lr * grads.d_bias;
    if (!scorer.embeddings().allFinite() || !scorer.head().allFinite() ||
        !scorer.bias().allFinite()) {
      throw NumericalError("toy_train: parameters diverged at step " +
                           std::to_string(step));
    }
  }
  return stats;
}

corpus::Label predict_label(const ToyScorer& scorer,
                            const ClozeInstance& instance) {
  const std::vector<int> ids = scorer.token_ids(instance);
  const std::size_t lp = instance.label_mask_position;
  const Eigen::MatrixXd logits =
      scorer.forward(ids, lp, {lp}, -1, {lp});
  return predict_from_logits(logits.row(0).transpose(),
                             scorer.verbalizer_ids());
}

std::vector<ClozeInstance> make_rule_dataset(int instances,
                                             std::uint64_t seed) {
  static const std::vector<std::string> kAttrs = {"color", "shape", "origin",
                                                  "flavor", "texture"};
  static const std::vector<std::string> kValues = {
      "red",  "blue", "green", "gold", "gray", "pink",
      "amber", "ivory", "teal", "plum", "rust", "mint"};
  Rng rng(Rng::mix(seed, "rule-data"));
  std::vector<ClozeInstance> out;
  out.reserve(static_cast<std::size_t>(instances));
  for (int i = 0; i < instances; ++i) {
    const std::string& attr = rng.pick(kAttrs);
    const std::string& value = rng.pick(kValues);
    const std::string premise = "the " + attr + " of the item is " + value;
    const corpus::Label label = static_cast<corpus::Label>(i % 3);
    std::string hypothesis;
    if (label == corpus::Label::E) {
      hypothesis = premise;
    } else if (label == corpus::Label::C) {
      std::string other = rng.pick(kValues);
      while (other == value) other = rng.pick(kValues);
      hypothesis = "the " + attr + " of the item is " + other;
    } else {
      std::string attr2 = rng.pick(kAttrs);
      while (attr2 == attr) attr2 = rng.pick(kAttrs);
      std::string other = rng.pick(kValues);
      while (other == value) other = rng.pick(kValues);
      hypothesis = "the " + attr2 + " of the item is " + other;
    }
    out.push_back(build_pattern(premise, hypothesis, label,
                                "toy:" + std::to_string(i)));
  }
  return out;
}

std::vector<std::string> rule_dataset_vocab() {
  std::vector<std::string> vocab = {"the",  "of",    "item", "is",
                                    "?",    ",",     std::string(kMaskToken),
                                    "Yes",  "Maybe", "No",
                                    "color", "shape", "origin", "flavor",
                                    "texture", "red", "blue", "green",
                                    "gold", "gray",  "pink", "amber",
                                    "ivory", "teal", "plum", "rust",
                                    "mint"};
  return vocab;
}

std::string masked_batch_to_json(const MaskedBatchEntry& entry) {
  nlohmann::ordered_json doc;
  doc["id"] = entry.id;
  doc["tokens"] = entry.tokens;
  doc["label_mask_position"] = entry.label_mask_position;
  doc["context_mask_positions"] = entry.context_mask_positions;
  doc["verbalizers"] = {{"E", entry.verbalizers[0]},
                        {"N", entry.verbalizers[1]},
                        {"C", entry.verbalizers[2]}};
  doc["gold"] = corpus::label_name(entry.gold);
  doc["condition"] = entry.condition;
  return doc.dump();
}

MaskedBatchEntry masked_batch_from_json(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("masked batch: ") + e.what(), e.byte);
  }
  MaskedBatchEntry entry;
  try {
    entry.id = doc.at("id").get<std::string>();
    entry.tokens = doc.at("tokens").get<std::vector<std::string>>();
    entry.label_mask_position = doc.at("label_mask_position").get<std::size_t>();
    entry.context_mask_positions =
        doc.at("context_mask_positions").get<std::vector<std::size_t>>();
    entry.gold = corpus::parse_label(doc.at("gold").get<std::string>());
    entry.condition = doc.value("condition", std::string());
    if (doc.contains("verbalizers")) {
      entry.verbalizers = {doc["verbalizers"].value("E", kVerbalizers[0]),
                           doc["verbalizers"].value("N", kVerbalizers[1]),
                           doc["verbalizers"].value("C", kVerbalizers[2])};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("masked batch: ") + e.what());
  }
  return entry;
}

std::string logit_record_to_json(const LogitRecord& record) {
  nlohmann::ordered_json doc;
  doc["id"] = record.id;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < record.rows.rows(); ++r) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < record.rows.cols(); ++c) {
      row.push_back(record.rows(r, c));
    }
    rows.push_back(std::move(row));
  }
  doc["logits"] = std::move(rows);
  return doc.dump();
}

LogitRecord logit_record_from_json(std::string_view line) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("logit record: ") + e.what(), e.byte);
  }
  LogitRecord record;
  try {
    record.id = doc.at("id").get<std::string>();
    const auto& rows = doc.at("logits");
    if (!rows.is_array() || rows.empty()) {
      throw ParseError("logit record '" + record.id + "': empty logits");
    }
    const std::size_t cols = rows[0].size();
    record.rows.resize(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) {
        throw ParseError("logit record '" + record.id +
                         "': ragged logit rows");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        record.rows(static_cast<Eigen::Index>(r),
                    static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("logit record: ") + e.what());
  }
  return record;
}

}  // namespace forge::pet
