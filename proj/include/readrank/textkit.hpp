#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "readrank/html.hpp"
#include "readrank/json.hpp"
#include "readrank/resources.hpp"

namespace readrank {

enum class Source {
  kWikipedia,
  kSimplewiki,
  kVikidia,
  kKlexikon,
  kWikikids,
  kTxikipedia,
  kOther,
};

std::string_view source_name(Source source);
// Throws Error(kFormat) for unknown names.
Source parse_source(std::string_view name);

struct RawDocument {
  std::string html;
  std::string title;
  std::string lang;
  Source source = Source::kOther;
};

// Plain text of one article version with its sentence segmentation.
struct ArticleText {
  std::string title;
  std::string lang;
  Source source = Source::kOther;
  std::string text;
  std::vector<std::string> sentences;
  std::size_t num_chars = 0;      // code points of `text`
  std::size_t num_sentences = 0;

  bool operator==(const ArticleText&) const = default;
};

// Builds an ArticleText by segmenting `text` with the language's rules.
ArticleText make_article_text(std::string title, std::string lang,
                              Source source, std::string text);

// Where the lead section ends and which elements are dropped.
struct LeadRules {
  std::set<std::string> boundary_tags{"h2"};
  // Parsoid wraps sections in <section data-mw-section-id="N">; any N > 0
  // starts a non-lead section.
  bool parsoid_sections = true;
  std::set<std::string> dropped_tags{"sup", "sub", "style", "script"};
  std::set<std::string> dropped_classes{
      "reference",      "references",  "mw-ref",
      "mw-reference-text", "reference-text", "mw-cite-backlink",
      "cite-bracket",   "noprint",       "redirectMsg"};
  // Paragraphs nested inside these are not article prose.
  std::set<std::string> excluded_containers{"table", "figure", "figcaption",
                                            "aside", "nav"};
  // Per-source override hook for wikis with other section templates.
  std::function<bool(const html::Node&)> extra_boundary;
};

LeadRules default_lead_rules(Source source);

// Errors: kMalformedInput (empty, invalid UTF-8, NUL bytes or no markup at
// all), kEmptyLead (no paragraph text before the first section boundary).
ArticleText extract_lead_text(const RawDocument& doc);
ArticleText extract_lead_text(const RawDocument& doc, const LeadRules& rules);

std::vector<std::string> split_sentences(std::string_view text,
                                         std::string_view lang);
std::vector<std::string> split_sentences(std::string_view text,
                                         std::string_view lang,
                                         const AbbreviationSet& abbreviations);

int count_syllables(std::string_view word, std::string_view lang);
int count_syllables(std::u32string_view word, std::string_view lang);

// Word tokens: maximal runs of letters/digits/marks, joined across a single
// internal apostrophe or hyphen.
std::vector<std::u32string> tokenize_words(std::u32string_view text);

void to_json(Json& j, const ArticleText& a);
void from_json(const Json& j, ArticleText& a);

std::vector<ArticleText> read_article_jsonl(const std::string& path);

}  // namespace readrank
