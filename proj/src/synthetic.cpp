#include "readrank/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include "readrank/textkit.hpp"

namespace readrank {
namespace {

constexpr std::array<std::string_view, 40> kShortWords = {
    "cat",  "dog",  "sun",  "tree", "red",  "big",  "run",  "play", "home", "day",
    "ball", "fish", "bird", "sky",  "sea",  "hat",  "cup",  "box",  "milk", "bread",
    "small", "good", "warm", "cold", "walk", "jump", "sing", "read", "see",  "look",
    "like", "live", "park", "farm", "book", "bed",  "car",  "bus",  "road", "hill"};

constexpr std::array<std::string_view, 30> kLongWords = {
    "administration", "constitutional", "international", "infrastructure",
    "approximately",  "characteristics", "considerable", "municipality",
    "establishment",  "environmental",  "significantly", "predominantly",
    "jurisdiction",   "representative", "architectural", "consolidation",
    "interpretation", "philosophical",  "contemporary",  "subsequently",
    "legislative",    "preliminary",    "sophisticated", "comprehensive",
    "organization",   "distribution",   "traditionally", "independence",
    "metropolitan",   "agricultural"};

constexpr std::array<std::string_view, 10> kFunctionWords = {
    "the", "of", "and", "in", "which", "was", "by", "with", "a", "to"};

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& pool) {
  return pool[rng.uniform_index(N)];
}

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
}

std::string jittered_sentence(Rng& rng, double difficulty) {
  return synthetic_sentence(rng, std::clamp(difficulty + rng.uniform(-0.05, 0.05), 0.0, 1.0));
}

std::string join(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

ArticlePair build_pair(std::size_t i, Rng& rng, int easy_sentences, int hard_sentences,
                      const SyntheticOptions& o) {
  const double d_easy = rng.uniform(0.0, o.easy_max_difficulty);
  const double d_hard = rng.uniform(o.hard_min_difficulty, 1.0);
  const std::string title = "Topic " + std::to_string(i);
  ArticlePair p;
  p.wikidata_id = "Q" + std::to_string(1000 + i);
  p.lang = "en";
  p.dataset = o.dataset;
  p.pair_id = make_pair_id(o.dataset, *p.wikidata_id, title);
  std::vector<std::string> hard;
  for (int s = 0; s < hard_sentences; ++s) hard.push_back(jittered_sentence(rng, d_hard));
  const auto derived = static_cast<int>(std::lround(o.derived_share * easy_sentences));
  std::vector<std::string> easy;
  for (int s = 0; s < easy_sentences; ++s) {
    easy.push_back(s < derived && s < hard_sentences ? simplify_sentence(rng, hard[s], 0.6)
                                                     : jittered_sentence(rng, d_easy));
  }
  p.easy = make_article_text(title, "en", Source::kSimplewiki, join(easy));
  p.hard = make_article_text(title, "en", Source::kWikipedia, join(hard));
  return p;
}

}  // namespace

SyntheticOptions easy_longer_options() {
  SyntheticOptions o;
  o.dataset = "synthetic-longer-easy";
  o.easy_min_sentences = 7;
  o.easy_max_sentences = 10;
  o.hard_min_sentences = 3;
  o.hard_max_sentences = 6;
  return o;
}

std::string synthetic_sentence(Rng& rng, double difficulty) {
  const int words = std::max(3, static_cast<int>(std::lround(5.0 + 18.0 * difficulty)) +
                                    uniform_int(rng, -2, 2));
  const double long_share = 0.05 + 0.5 * difficulty;
  std::string out;
  for (int w = 0; w < words; ++w) {
    std::string_view word;
    const double u = rng.uniform01();
    if (u < long_share) {
      word = pick(rng, kLongWords);
    } else if (u < long_share + 0.3) {
      word = pick(rng, kFunctionWords);
    } else {
      word = pick(rng, kShortWords);
    }
    if (w > 0) out += (difficulty > 0.5 && w == words / 2) ? ", " : " ";
    out += word;
  }
  out[0] = static_cast<char>(out[0] - 'a' + 'A');
  out += '.';
  return out;
}

std::string synthetic_text(Rng& rng, int sentences, double difficulty) {
  std::vector<std::string> out;
  for (int s = 0; s < sentences; ++s) out.push_back(jittered_sentence(rng, difficulty));
  return join(out);
}

std::string simplify_sentence(Rng& rng, std::string_view sentence, double rate) {
  std::string out;
  std::size_t pos = 0;
  while (pos < sentence.size()) {
    const std::size_t end = std::min(sentence.find_first_of(" ,.", pos), sentence.size());
    const std::string_view word = sentence.substr(pos, end - pos);
    const bool is_long = std::find(kLongWords.begin(), kLongWords.end(), word) != kLongWords.end();
    if (is_long && rng.uniform01() < rate) {
      out += pick(rng, kShortWords);
    } else {
      out += word;
    }
    if (end < sentence.size()) out += sentence[end];
    pos = end + 1;
  }
  return out;
}

std::vector<ArticlePair> synthetic_pairs(std::size_t n, std::uint64_t seed,
                                         const SyntheticOptions& options) {
  Rng rng = Rng::substream(seed, "synthetic");
  std::vector<ArticlePair> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int ne = uniform_int(rng, options.easy_min_sentences, options.easy_max_sentences);
    const int nh = uniform_int(rng, options.hard_min_sentences, options.hard_max_sentences);
    out.push_back(build_pair(i, rng, ne, nh, options));
  }
  return out;
}

std::vector<ArticlePair> synthetic_pairs_with_counts(
    const std::vector<std::pair<int, int>>& sentence_counts, std::uint64_t seed,
    const SyntheticOptions& options) {
  Rng rng = Rng::substream(seed, "synthetic");
  std::vector<ArticlePair> out;
  out.reserve(sentence_counts.size());
  for (std::size_t i = 0; i < sentence_counts.size(); ++i) {
    out.push_back(build_pair(i, rng, sentence_counts[i].first, sentence_counts[i].second, options));
  }
  return out;
}

std::vector<std::string> synthetic_lead_texts(std::size_t n, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, "lead-texts");
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(synthetic_text(rng, uniform_int(rng, 5, 9), rng.uniform01()));
  }
  return out;
}

}  // namespace readrank
