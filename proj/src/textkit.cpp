#include "readrank/textkit.hpp"

#include <algorithm>
#include <cmath>

#include "readrank/error.hpp"
#include "readrank/io.hpp"
#include "readrank/utf8.hpp"

namespace readrank {
namespace {

using html::Node;

bool is_dropped(const Node& n, const LeadRules& rules) {
  if (rules.dropped_tags.count(n.name) != 0) return true;
  return std::any_of(rules.dropped_classes.begin(), rules.dropped_classes.end(),
                     [&](const std::string& c) { return n.has_class(c); });
}

bool is_boundary(const Node& n, const LeadRules& rules) {
  if (rules.boundary_tags.count(n.name) != 0) return true;
  if (rules.parsoid_sections && n.name == "section") {
    if (const std::string* id = n.attribute("data-mw-section-id")) {
      try {
        if (std::stoi(*id) > 0) return true;
      } catch (const std::exception&) {
      }
    }
  }
  return rules.extra_boundary && rules.extra_boundary(n);
}

void flatten(const Node& n, const LeadRules& rules, std::string& out) {
  for (const auto& child : n.children) {
    if (child->kind == Node::Kind::kText) {
      out += child->text;
    } else if (child->is_element("br")) {
      out += ' ';
    } else if (child->is_element() && !is_dropped(*child, rules)) {
      flatten(*child, rules, out);
    }
  }
}

std::string normalize_whitespace(std::string_view text) {
  const std::u32string cps = utf8::decode(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t cp : cps) {
    if (utf8::is_space(cp)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    utf8::append(out, cp);
  }
  return out;
}

class LeadCollector {
 public:
  explicit LeadCollector(const LeadRules& rules) : rules_(rules) {}

  void walk(const Node& n, bool excluded) {
    for (const auto& child : n.children) {
      if (stopped_) return;
      if (!child->is_element()) continue;
      if (is_boundary(*child, rules_)) {
        stopped_ = true;
        return;
      }
      if (child->name == "p") {
        if (!excluded) {
          std::string raw;
          flatten(*child, rules_, raw);
          std::string para = normalize_whitespace(raw);
          if (!para.empty()) paragraphs_.push_back(std::move(para));
        }
        continue;
      }
      if (is_dropped(*child, rules_)) continue;
      walk(*child, excluded || rules_.excluded_containers.count(child->name));
    }
  }

  std::string text() const {
    std::string out;
    for (std::size_t i = 0; i < paragraphs_.size(); ++i) {
      if (i > 0) out += '\n';
      out += paragraphs_[i];
    }
    return out;
  }

 private:
  const LeadRules& rules_;
  std::vector<std::string> paragraphs_;
  bool stopped_ = false;
};

// --- sentence segmentation -------------------------------------------------

bool is_cjk_terminal(char32_t c) {
  return c == 0x3002 || c == 0xFF01 || c == 0xFF1F;
}

bool is_terminal(char32_t c, std::string_view lang) {
  switch (c) {
    case U'.':
    case U'!':
    case U'?':
    case 0x2026:  // …
    case 0x0589:  // Armenian full stop
    case 0x037E:  // Greek question mark
    case 0x061F:  // Arabic question mark
    case 0x0964:  // Devanagari danda
      return true;
    case U';':
      return lang == "el";
    default:
      return is_cjk_terminal(c);
  }
}

bool is_closer(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U')': case U']': case U'}':
    case 0x201D: case 0x2019: case 0xBB: case 0x203A:
    case 0x300D: case 0x300F: case 0xFF09:
      return true;
    default:
      return false;
  }
}

bool is_opener(char32_t c) {
  switch (c) {
    case U'"': case U'\'': case U'(': case U'[': case U'{':
    case 0x201C: case 0x2018: case 0x201E: case 0xAB: case 0x2039:
    case 0xBF: case 0xA1: case 0x300C: case 0x300E: case 0xFF08:
      return true;
    default:
      return false;
  }
}

bool starts_sentence(char32_t c) {
  return utf8::is_upper(c) || utf8::is_caseless_letter(c);
}

std::u32string_view token_before(std::u32string_view t, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !utf8::is_space(t[b - 1])) --b;
  while (b < dot && is_opener(t[b])) ++b;
  return t.substr(b, dot - b);
}

void emit(std::u32string_view t, std::size_t from, std::size_t to,
          std::vector<std::string>& out) {
  while (from < to && utf8::is_space(t[from])) ++from;
  while (to > from && utf8::is_space(t[to - 1])) --to;
  if (to > from) out.push_back(utf8::encode(t.substr(from, to - from)));
}

// --- syllables --------------------------------------------------------------

bool is_vowel_letter(char32_t c) {
  static const std::u32string_view kVowels =
      U"aeiouàáâãäåæèéêëìíîïòóôõöøùúûüœāăąēĕėęěīĭįıōŏőūŭůűų"
      U"αεηιουωάέήίόύώϊϋΐΰ"
      U"аеёиоуыэюяіїє";
  return kVowels.find(c) != std::u32string_view::npos;
}

}  // namespace

std::string_view source_name(Source source) {
  switch (source) {
    case Source::kWikipedia: return "wikipedia";
    case Source::kSimplewiki: return "simplewiki";
    case Source::kVikidia: return "vikidia";
    case Source::kKlexikon: return "klexikon";
    case Source::kWikikids: return "wikikids";
    case Source::kTxikipedia: return "txikipedia";
    case Source::kOther: return "other";
  }
  return "other";
}

Source parse_source(std::string_view name) {
  for (Source s : {Source::kWikipedia, Source::kSimplewiki, Source::kVikidia,
                   Source::kKlexikon, Source::kWikikids, Source::kTxikipedia,
                   Source::kOther}) {
    if (source_name(s) == name) return s;
  }
  throw Error(ErrorCode::kFormat, "unknown source '" + std::string(name) + "'");
}

ArticleText make_article_text(std::string title, std::string lang,
                              Source source, std::string text) {
  ArticleText a;
  a.sentences = split_sentences(text, lang);
  a.num_sentences = a.sentences.size();
  a.num_chars = utf8::length(text);
  a.title = std::move(title);
  a.lang = std::move(lang);
  a.source = source;
  a.text = std::move(text);
  return a;
}

LeadRules default_lead_rules(Source source) {
  LeadRules rules;
  switch (source) {
    case Source::kKlexikon:
      // Klexikon pages carry a boxed "Klexikon-Zusammenfassung" summary.
      rules.dropped_classes.insert("klexikon-zusammenfassung");
      break;
    case Source::kWikikids:
      rules.dropped_classes.insert("wikikids-box");
      break;
    default:
      break;
  }
  return rules;
}

ArticleText extract_lead_text(const RawDocument& doc) {
  return extract_lead_text(doc, default_lead_rules(doc.source));
}

ArticleText extract_lead_text(const RawDocument& doc, const LeadRules& rules) {
  if (doc.html.empty()) {
    throw Error(ErrorCode::kMalformedInput, "empty document '" + doc.title + "'");
  }
  if (!utf8::is_valid(doc.html)) {
    throw Error(ErrorCode::kMalformedInput,
                "document '" + doc.title + "' is not valid UTF-8");
  }
  if (doc.html.find('\0') != std::string::npos) {
    throw Error(ErrorCode::kMalformedInput,
                "document '" + doc.title + "' contains NUL bytes");
  }
  const html::Document tree = html::parse(doc.html);
  if (tree.element_count == 0) {
    throw Error(ErrorCode::kMalformedInput,
                "document '" + doc.title + "' contains no markup");
  }
  LeadCollector collector(rules);
  collector.walk(*tree.root, false);
  std::string text = collector.text();
  if (text.empty()) {
    throw Error(ErrorCode::kEmptyLead,
                "no paragraph text in the lead section of '" + doc.title + "'");
  }
  return make_article_text(doc.title, doc.lang, doc.source, std::move(text));
}

std::vector<std::string> split_sentences(std::string_view text,
                                         std::string_view lang) {
  return split_sentences(text, lang, abbreviations_for(lang));
}

std::vector<std::string> split_sentences(std::string_view text,
                                         std::string_view lang,
                                         const AbbreviationSet& abbreviations) {
  const std::u32string t = utf8::decode(text);
  const std::size_t n = t.size();
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = t[i];
    if (c == U'\n') {
      emit(t, start, i, out);
      start = i + 1;
      continue;
    }
    if (!is_terminal(c, lang)) continue;

    std::size_t j = i + 1;
    std::size_t terminals = 1;
    while (j < n && (is_terminal(t[j], lang) || is_closer(t[j]))) {
      if (is_terminal(t[j], lang)) ++terminals;
      ++j;
    }
    if (is_cjk_terminal(c)) {
      emit(t, start, j, out);
      start = j;
      i = j - 1;
      continue;
    }
    if (j >= n || !utf8::is_space(t[j])) {
      i = j - 1;
      continue;
    }
    std::size_t k = j;
    while (k < n && utf8::is_space(t[k])) ++k;
    while (k < n && is_opener(t[k])) ++k;
    if (k >= n || !starts_sentence(t[k])) {
      i = j - 1;
      continue;
    }
    if (c == U'.' && terminals == 1) {
      const std::u32string_view tok = token_before(t, i);
      const bool initial = tok.size() == 1 && utf8::is_upper(tok[0]);
      if (initial || (!tok.empty() && abbreviations.contains(tok))) {
        i = j - 1;
        continue;
      }
    }
    emit(t, start, j, out);
    start = j;
    i = j - 1;
  }
  emit(t, start, n, out);
  return out;
}

int count_syllables(std::string_view word, std::string_view lang) {
  return count_syllables(utf8::decode(word), lang);
}

int count_syllables(std::u32string_view word, std::string_view lang) {
  std::u32string letters;
  std::size_t alphabetic = 0;
  for (char32_t c : word) {
    if (!utf8::is_letter(c)) continue;
    letters.push_back(utf8::to_lower(c));
    const auto script = utf8::script_of(c);
    if (script == utf8::Script::kLatin || script == utf8::Script::kGreek ||
        script == utf8::Script::kCyrillic) {
      ++alphabetic;
    }
  }
  if (letters.empty()) return 1;
  if (2 * alphabetic < letters.size()) {
    // No usable vowel grouping: roughly one syllable per three characters.
    return std::max(1, static_cast<int>(std::lround(letters.size() / 3.0)));
  }

  const bool english = lang == "en";
  int groups = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    const char32_t c = letters[i];
    bool vowel = is_vowel_letter(c);
    if (c == U'y') vowel = english ? (i > 0 && !prev_vowel) : true;
    if (vowel && !prev_vowel) ++groups;
    prev_vowel = vowel;
  }

  if (english && groups > 1 && letters.size() >= 3 && letters.back() == U'e') {
    const char32_t before = letters[letters.size() - 2];
    const bool consonant_before = !is_vowel_letter(before) && before != U'y';
    const bool le_ending = before == U'l' && letters.size() >= 3 &&
                           !is_vowel_letter(letters[letters.size() - 3]);
    if (consonant_before && !le_ending) --groups;
  }
  return std::max(1, groups);
}

std::vector<std::u32string> tokenize_words(std::u32string_view text) {
  std::vector<std::u32string> words;
  std::u32string cur;
  const std::size_t n = text.size();
  for (std::size_t i = 0; i < n; ++i) {
    const char32_t c = text[i];
    if (utf8::is_word_char(c)) {
      cur.push_back(c);
      continue;
    }
    const bool joiner = c == U'\'' || c == 0x2019 || c == U'-' || c == 0x2010;
    if (joiner && !cur.empty() && i + 1 < n && utf8::is_word_char(text[i + 1])) {
      cur.push_back(c);
      continue;
    }
    if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

void to_json(Json& j, const ArticleText& a) {
  j = Json{{"title", a.title},
                     {"lang", a.lang},
                     {"source", source_name(a.source)},
                     {"text", a.text},
                     {"sentences", a.sentences},
                     {"num_chars", a.num_chars},
                     {"num_sentences", a.num_sentences}};
}

void from_json(const Json& j, ArticleText& a) {
  a.title = j.value("title", std::string());
  a.lang = j.value("lang", std::string());
  a.source = parse_source(j.value("source", std::string("other")));
  a.text = j.at("text").get<std::string>();
  if (j.contains("sentences") && !j.at("sentences").is_null()) {
    a.sentences = j.at("sentences").get<std::vector<std::string>>();
  } else {
    a.sentences = split_sentences(a.text, a.lang);
  }
  a.num_sentences = a.sentences.size();
  a.num_chars = utf8::length(a.text);
  if (j.contains("num_sentences") &&
      j.at("num_sentences").get<std::size_t>() != a.num_sentences) {
    throw Error(ErrorCode::kFormat,
                "num_sentences disagrees with sentences for '" + a.title + "'");
  }
}

std::vector<ArticleText> read_article_jsonl(const std::string& path) {
  std::vector<ArticleText> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(row.get<ArticleText>());
  return out;
}

}  // namespace readrank
