#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readrank/corpus.hpp"
#include "readrank/features.hpp"
#include "readrank/json.hpp"
#include "readrank/network.hpp"

namespace readrank {

// max(0, -y * (s1 - s2) + m). y = +1 means s1 must exceed s2 by m.
double margin_ranking_loss(double s1, double s2, int y, double margin);

enum class ScorerMode { kDocument, kSentence };
std::string_view mode_name(ScorerMode mode);
ScorerMode parse_mode(std::string_view name);

// Training always presents (s_hard, s_easy, y = +1).
struct RankedPairExample {
  std::vector<double> x_easy;
  std::vector<double> x_hard;
  int y = +1;
};

struct TrainingMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  double learning_rate = 0.0;
  double weight_decay = 0.0;
  std::size_t hidden_units = 0;
  std::size_t batch_size = 0;
  double val_fraction = 0.0;
  std::size_t n_train_examples = 0;
  std::size_t n_val_examples = 0;
  int best_epoch = 0;  // 1-based
  std::vector<double> loss_curve;      // mean training loss per epoch
  std::vector<double> val_loss_curve;  // validation loss per epoch
};

// Trained readability scorer. Higher scores mean harder text. Immutable
// once trained or loaded; safe to share across threads.
struct ScorerModel {
  ScorerMode mode = ScorerMode::kDocument;
  std::vector<std::string> feature_names;
  Standardizer norm;
  ScoringNetwork network;
  double margin = 0.5;
  std::string version;
  TrainingMeta meta;

  double score_features(std::span<const double> raw) const;
};

struct TrainConfig {
  ScorerMode mode = ScorerMode::kDocument;
  int hidden_units = -1;  // -1: 16 for document mode, 0 for sentence mode
  int epochs = 50;
  double learning_rate = 1e-2;
  double min_learning_rate_ratio = 0.01;
  double weight_decay = 1e-6;
  double margin = 0.5;
  std::uint64_t seed = 0;
  double val_fraction = 0.01;
  std::size_t batch_size = 32;
  double sentence_threshold = 0.5;

  std::size_t resolved_hidden_units() const;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

// Mean margin ranking loss over examples whose inputs are already
// normalized, with its subgradient (0 at the hinge kink).
LossAndGradient batch_loss_and_gradient(const ScoringNetwork& network,
                                        std::span<const RankedPairExample> examples,
                                        double margin);

// Trains on precomputed raw feature examples. `val` may be empty, in which
// case checkpoint selection falls back to the training loss.
// Errors: kDegenerateData when every example has identical sides.
ScorerModel train_on_examples(const std::vector<RankedPairExample>& train,
                              const std::vector<RankedPairExample>& val,
                              const TrainConfig& config,
                              std::vector<std::string> feature_names);

// Siamese MRL training on article pairs (document or sentence mode).
ScorerModel train(const std::vector<ArticlePair>& train_pairs, const TrainConfig& config);

// Errors: kEmptyText.
double score(const ScorerModel& model, const ArticleText& text);

std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
// 1 - distance / max(length) over code points; 1 for two empty strings.
double levenshtein_similarity(std::string_view a, std::string_view b);

struct AlignedSentence {
  std::string easy;
  std::string hard;
  double similarity = 0.0;
};
using SentenceAlignment = std::vector<AlignedSentence>;

// Greedy: each easy sentence in order takes its most similar unused hard
// sentence when the similarity reaches `threshold`.
SentenceAlignment align_sentences(const ArticleText& easy, const ArticleText& hard,
                                  double threshold);

std::vector<RankedPairExample> build_sentence_training_set(
    const std::vector<ArticlePair>& train_pairs, double threshold);

// Single-sentence text used for sentence-level featurization.
ArticleText sentence_text(std::string_view sentence, std::string_view lang);

Json model_to_json(const ScorerModel& model);
// Validates layer shapes against the feature list.
ScorerModel model_from_json(const Json& j);
void save_model(const std::string& path, const ScorerModel& model);
ScorerModel load_model(const std::string& path);

}  // namespace readrank
