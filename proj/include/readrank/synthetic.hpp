#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readrank/corpus.hpp"
#include "readrank/rng.hpp"

namespace readrank {

// Seeded English-like corpus with a controllable difficulty gap. Difficulty
// d in [0, 1] drives sentence length and the share of long words.
struct SyntheticOptions {
  std::string dataset = "synthetic-en";
  double easy_max_difficulty = 0.35;
  double hard_min_difficulty = 0.65;
  int easy_min_sentences = 3;
  int easy_max_sentences = 6;
  int hard_min_sentences = 4;
  int hard_max_sentences = 8;
  // Share of easy sentences written as simplified copies of hard ones, so
  // that sentence alignment finds matches.
  double derived_share = 0.0;
};

// Easy versions longer than hard ones, as on some children's wikis.
SyntheticOptions easy_longer_options();

std::string synthetic_sentence(Rng& rng, double difficulty);
std::string synthetic_text(Rng& rng, int sentences, double difficulty);
// Replaces long words with short ones, each with probability `rate`.
std::string simplify_sentence(Rng& rng, std::string_view sentence, double rate);

std::vector<ArticlePair> synthetic_pairs(std::size_t n, std::uint64_t seed,
                                         const SyntheticOptions& options = {});

// One pair per entry with exactly (easy, hard) sentences.
std::vector<ArticlePair> synthetic_pairs_with_counts(
    const std::vector<std::pair<int, int>>& sentence_counts, std::uint64_t seed,
    const SyntheticOptions& options = {});

// Lead-section-sized texts (5 to 9 sentences) of mixed difficulty.
std::vector<std::string> synthetic_lead_texts(std::size_t n, std::uint64_t seed);

}  // namespace readrank
