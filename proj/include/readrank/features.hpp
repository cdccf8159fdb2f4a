#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "readrank/json.hpp"
#include "readrank/resources.hpp"
#include "readrank/textkit.hpp"

namespace readrank {

inline constexpr std::string_view kFeatureSetVersion = "general-v1";
inline constexpr std::size_t kNumFeatures = 14;

// Order is part of the model file contract; bump kFeatureSetVersion when it
// changes.
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "num_sentences",       "num_words",          "num_chars",
    "avg_sentence_len_words", "avg_word_len_chars", "avg_sentence_len_chars",
    "syllables_per_word",  "words_per_sentence", "type_token_ratio",
    "long_word_ratio",     "punct_per_sentence", "digit_ratio",
    "uppercase_ratio",     "monosyllable_ratio"};

struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double get(std::string_view name) const;
  std::vector<double> to_vector() const { return {values.begin(), values.end()}; }
};

// Raw counts behind the features and the readability formulas.
struct TextStats {
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t chars = 0;         // code points of the text
  std::size_t non_space_chars = 0;
  std::size_t word_chars = 0;    // code points inside word tokens
  std::size_t syllables = 0;
  std::size_t distinct_words = 0;  // case-folded
  std::size_t long_words = 0;    // more than 6 code points
  std::size_t monosyllables = 0;
  std::size_t punctuation = 0;
  std::size_t digits = 0;
  std::size_t letters = 0;
  std::size_t uppercase = 0;
};

// Errors: kEmptyText when there are no sentences or no word tokens.
TextStats text_stats(const ArticleText& text);
FeatureVector featurize(const ArticleText& text);
FeatureVector features_from_stats(const TextStats& stats);

enum class Formula { kFre, kFkgl };

struct FormulaScore {
  Formula formula = Formula::kFre;
  double value = 0.0;
  std::string lang_variant;
};

double fre_from_counts(double sentences, double words, double syllables,
                       const FreCoefficients& coefficients);
double fkgl_from_counts(double sentences, double words, double syllables);

// Language-specific coefficients when the table has them, English otherwise.
FormulaScore flesch_reading_ease(const ArticleText& text, std::string_view lang);
FormulaScore flesch_reading_ease(const ArticleText& text, std::string_view lang,
                                 const FreTable& table);
FormulaScore fkgl(const ArticleText& text);

// Sentence count as a difficulty score (more sentences = harder).
double ns_baseline(const ArticleText& text);

// Per-feature z-scoring with population standard deviation.
struct Standardizer {
  static constexpr double kStdFloor = 1e-12;

  std::vector<double> mean;
  std::vector<double> std;

  static Standardizer fit(const std::vector<std::vector<double>>& rows);
  std::vector<double> apply(std::span<const double> x) const;
  std::size_t dimension() const { return mean.size(); }
};

Json features_to_json(const FeatureVector& f);

}  // namespace readrank
