#include "readrank/features.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "readrank/error.hpp"
#include "readrank/utf8.hpp"

namespace readrank {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double FeatureVector::get(std::string_view name) const {
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    if (kFeatureNames[i] == name) return values[i];
  }
  throw Error(ErrorCode::kFormat, "unknown feature '" + std::string(name) + "'");
}

TextStats text_stats(const ArticleText& text) {
  if (text.sentences.empty()) {
    throw Error(ErrorCode::kEmptyText, "text '" + text.title + "' has no sentences");
  }
  TextStats s;
  s.sentences = text.sentences.size();
  const std::u32string cps = utf8::decode(text.text);
  s.chars = cps.size();
  for (char32_t c : cps) {
    if (utf8::is_space(c)) continue;
    ++s.non_space_chars;
    if (utf8::is_digit(c)) {
      ++s.digits;
    } else if (utf8::is_letter(c)) {
      ++s.letters;
      if (utf8::is_upper(c)) ++s.uppercase;
    } else if (!utf8::is_mark(c)) {
      ++s.punctuation;
    }
  }
  const auto words = tokenize_words(cps);
  if (words.empty()) {
    throw Error(ErrorCode::kEmptyText, "text '" + text.title + "' has no words");
  }
  s.words = words.size();
  std::set<std::u32string> distinct;
  for (const auto& w : words) {
    s.word_chars += w.size();
    if (w.size() > 6) ++s.long_words;
    const int syl = count_syllables(std::u32string_view(w), text.lang);
    s.syllables += static_cast<std::size_t>(syl);
    if (syl == 1) ++s.monosyllables;
    distinct.insert(utf8::to_lower(w));
  }
  s.distinct_words = distinct.size();
  return s;
}

FeatureVector features_from_stats(const TextStats& s) {
  FeatureVector f;
  const double per_sentence_words = ratio(s.words, s.sentences);
  f.values = {static_cast<double>(s.sentences),
              static_cast<double>(s.words),
              static_cast<double>(s.chars),
              per_sentence_words,
              ratio(s.word_chars, s.words),
              ratio(s.chars, s.sentences),
              ratio(s.syllables, s.words),
              per_sentence_words,
              ratio(s.distinct_words, s.words),
              ratio(s.long_words, s.words),
              ratio(s.punctuation, s.sentences),
              ratio(s.digits, s.non_space_chars),
              ratio(s.uppercase, s.letters),
              ratio(s.monosyllables, s.words)};
  return f;
}

FeatureVector featurize(const ArticleText& text) {
  return features_from_stats(text_stats(text));
}

double fre_from_counts(double sentences, double words, double syllables,
                       const FreCoefficients& c) {
  return c.base - c.sentence_length * (words / sentences) -
         c.word_length * (syllables / words);
}

double fkgl_from_counts(double sentences, double words, double syllables) {
  return 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
}

FormulaScore flesch_reading_ease(const ArticleText& text, std::string_view lang) {
  return flesch_reading_ease(text, lang, default_fre_table());
}

FormulaScore flesch_reading_ease(const ArticleText& text, std::string_view lang,
                                 const FreTable& table) {
  const TextStats s = text_stats(text);
  const FreCoefficients& c = table.lookup(lang);
  return {Formula::kFre,
          fre_from_counts(static_cast<double>(s.sentences), static_cast<double>(s.words),
                          static_cast<double>(s.syllables), c),
          c.lang};
}

FormulaScore fkgl(const ArticleText& text) {
  const TextStats s = text_stats(text);
  return {Formula::kFkgl,
          fkgl_from_counts(static_cast<double>(s.sentences), static_cast<double>(s.words),
                           static_cast<double>(s.syllables)),
          "en"};
}

double ns_baseline(const ArticleText& text) {
  return static_cast<double>(text.num_sentences);
}

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    throw Error(ErrorCode::kDegenerateData, "cannot standardize an empty set");
  }
  const std::size_t d = rows.front().size();
  Standardizer st;
  st.mean.assign(d, 0.0);
  st.std.assign(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) st.mean[k] += r[k];
  }
  const double n = static_cast<double>(rows.size());
  for (auto& m : st.mean) m /= n;
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = r[k] - st.mean[k];
      st.std[k] += dev * dev;
    }
  }
  for (auto& v : st.std) v = std::max(std::sqrt(v / n), kStdFloor);
  return st;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    // A feature that was constant in training carries no information.
    out[k] = std[k] <= kStdFloor ? 0.0 : (x[k] - mean[k]) / std[k];
  }
  return out;
}

Json features_to_json(const FeatureVector& f) {
  Json j = Json::object();
  for (std::size_t i = 0; i < kNumFeatures; ++i) j[std::string(kFeatureNames[i])] = f[i];
  return j;
}

}  // namespace readrank
