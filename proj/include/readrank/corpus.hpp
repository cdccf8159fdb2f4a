#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readrank/json.hpp"
#include "readrank/textkit.hpp"

namespace readrank {

inline constexpr std::size_t kMinSentencesPerSide = 3;

// One concept in two readability levels; the dataset unit.
struct ArticlePair {
  std::string pair_id;
  std::optional<std::string> wikidata_id;
  std::string lang;
  std::string dataset;  // e.g. "simplewiki-en", "vikidia-fr"
  ArticleText easy;
  ArticleText hard;

  bool operator==(const ArticlePair&) const = default;
};

// An extracted article plus the page metadata used for matching.
struct SideRecord {
  ArticleText article;
  std::optional<std::string> wikidata_id;
  std::vector<std::string> redirects;  // alternative titles
  int namespace_id = 0;
  std::set<std::string> page_props;  // e.g. "disambiguation", "list"
};

void to_json(Json& j, const SideRecord& r);
void from_json(const Json& j, SideRecord& r);

enum class SkipReason { kAmbiguous, kUnmatched, kTooShort, kDisambiguation };
std::string_view skip_reason_name(SkipReason reason);

struct SkipEntry {
  std::string title;
  SkipReason reason;

  bool operator==(const SkipEntry&) const = default;
};

struct MatchResult {
  std::vector<ArticlePair> pairs;
  std::vector<SkipEntry> skips;

  std::size_t count(SkipReason reason) const;
};

// Flags disambiguation and list pages: page properties first, then title
// patterns.
class PageFilter {
 public:
  PageFilter();  // default multilingual title patterns
  explicit PageFilter(std::vector<std::string> title_patterns);

  bool excluded(const SideRecord& record) const;

 private:
  std::vector<std::regex> patterns_;
};

// MediaWiki-style title key: trimmed, underscores as spaces, runs of spaces
// collapsed, first letter uppercased.
std::string normalize_title(std::string_view title);

// pair_id = dataset + ":" + (wikidata id or hard title with '_' for spaces).
std::string make_pair_id(std::string_view dataset,
                         const std::optional<std::string>& wikidata_id,
                         std::string_view hard_title);

bool passes_length_filter(const ArticleText& easy, const ArticleText& hard);

// Inner join on wikidata id. Errors: kDuplicateId when one side repeats an
// id with different text.
MatchResult match_by_wikidata(const std::vector<SideRecord>& hard_set,
                              const std::vector<SideRecord>& easy_set,
                              std::string_view dataset,
                              const PageFilter& filter = PageFilter());

class TitleIndex {
 public:
  // `redirect_edges` are (from, to) pairs in addition to each record's own
  // redirect list; chains are flattened so every alias resolves in one hop.
  static TitleIndex build(
      std::vector<SideRecord> records,
      const std::vector<std::pair<std::string, std::string>>& redirect_edges = {});

  std::optional<std::size_t> resolve(std::string_view title) const;
  // Canonical title plus every alias, normalized.
  const std::set<std::string>& titles_of(std::size_t index) const {
    return title_sets_[index];
  }
  const std::vector<SideRecord>& records() const { return records_; }

 private:
  std::vector<SideRecord> records_;
  std::vector<std::set<std::string>> title_sets_;
  std::map<std::string, std::size_t, std::less<>> lookup_;
};

// Pairs an easy article with a hard one iff each is the other's only
// candidate among all titles and redirects.
MatchResult match_by_title(const TitleIndex& hard_index,
                           const TitleIndex& easy_index,
                           std::string_view dataset,
                           const PageFilter& filter = PageFilter());

// Basque Wikipedia keeps the children's version of "T" at "Txikipedia:T"
// in namespace 104.
MatchResult match_txikipedia(const std::vector<SideRecord>& articles,
                             std::string_view dataset = "txikipedia-eu");

// k -> number of wikidata ids present in exactly k >= 2 datasets.
std::map<std::size_t, std::size_t> cooccurrence_report(
    const std::vector<std::vector<ArticlePair>>& datasets);

struct TrainTestSplit {
  std::vector<ArticlePair> train;
  std::vector<ArticlePair> test;
};

// Pairs sharing a wikidata id always land in the same split.
TrainTestSplit split_train_test(const std::vector<ArticlePair>& pairs,
                                double train_fraction, std::uint64_t seed);

// Pair-file rows (field order is part of the file contract).
Json pair_to_json(const ArticlePair& pair);
ArticlePair pair_from_json(const Json& j);
std::vector<ArticlePair> read_pairs(const std::string& path);
void write_pairs(const std::string& path, const std::vector<ArticlePair>& pairs);

Json skip_to_json(const SkipEntry& skip);

// Column names of an externally published pair table.
struct PairFieldMapping {
  std::string wikidata_id = "wikidata_id";
  std::string lang = "lang";
  std::string dataset = "dataset";
  std::string easy_title = "title_easy";
  std::string easy_text = "text_easy";
  std::string hard_title = "title_hard";
  std::string hard_text = "text_hard";
};

struct IngestResult {
  std::vector<ArticlePair> pairs;
  std::size_t dropped_too_short = 0;
};

// Rows are flat objects (JSONL records or CSV rows as objects). Missing
// lang/dataset columns fall back to the given defaults.
IngestResult ingest_published(const std::vector<Json>& rows,
                              const PairFieldMapping& mapping,
                              std::string_view default_dataset,
                              std::string_view default_lang,
                              bool enforce_min_sentences = true);

// Loads a .csv/.tsv or JSONL file into flat row objects.
std::vector<Json> load_table_rows(const std::string& path);

}  // namespace readrank
