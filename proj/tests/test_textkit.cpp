#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "readrank/error.hpp"
#include "readrank/html.hpp"
#include "readrank/io.hpp"
#include "readrank/resources.hpp"
#include "readrank/rng.hpp"
#include "readrank/textkit.hpp"
#include "readrank/utf8.hpp"

using namespace readrank;
namespace fs = std::filesystem;

namespace {

ArticleText lead(const std::string& html, Source source = Source::kWikipedia) {
  return extract_lead_text(RawDocument{html, "T", "en", source});
}

ErrorCode error_of(const std::string& html) {
  try {
    lead(html);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kIo;
}

std::string squash(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\n') out += c;
  }
  return out;
}

std::string random_word(Rng& rng) {
  static const std::string kLetters = "abcdefghijklmnopqrstuvwxyz";
  std::string w;
  const auto len = 1 + rng.uniform_index(9);
  for (std::uint64_t i = 0; i < len; ++i) w += kLetters[rng.uniform_index(kLetters.size())];
  return w;
}

// Random prose with mixed punctuation, numbers and abbreviations.
std::string random_text(Rng& rng) {
  static const std::vector<std::string> kExtras = {"Dr.", "3.5", "U.S.", "e.g.", "J.",
                                                   "(see", "below)", "\"Yes!\"", "…"};
  std::string out;
  const auto words = 1 + rng.uniform_index(40);
  for (std::uint64_t i = 0; i < words; ++i) {
    if (i > 0) out += rng.uniform_index(10) == 0 ? "  " : " ";
    std::string w = rng.uniform_index(6) == 0 ? kExtras[rng.uniform_index(kExtras.size())]
                                              : random_word(rng);
    if (rng.uniform_index(3) == 0) w[0] = static_cast<char>(std::toupper(w[0]));
    out += w;
    const auto p = rng.uniform_index(8);
    if (p == 0) out += '.';
    if (p == 1) out += '?';
    if (p == 2) out += ',';
  }
  return out;
}

}  // namespace

TEST_CASE("lead extraction flattens formatting and stops at the first h2") {
  CHECK(lead("<p>Hello <b>world</b>.</p><h2>Next</h2><p>Ignored.</p>").text == "Hello world.");
}

TEST_CASE("superscript content is removed") {
  CHECK(lead("<p>Water is wet<sup>[1]</sup>.</p>").text == "Water is wet.");
}

TEST_CASE("subscripts and reference classes are removed") {
  CHECK(lead("<p>CO<sub>2</sub> gas<span class=\"reference\">[3]</span> rises.</p>").text ==
        "CO gas rises.");
}

TEST_CASE("paragraphs are joined with single newlines") {
  const auto a = lead("<p>One a.</p>\n\n<p>  Two   b. </p>");
  CHECK(a.text == "One a.\nTwo b.");
  CHECK(a.num_sentences == 2);
}

TEST_CASE("lead extraction errors") {
  CHECK(error_of("") == ErrorCode::kMalformedInput);
  CHECK(error_of("just some words") == ErrorCode::kMalformedInput);
  CHECK(error_of(std::string("<p>a\0b</p>", 10)) == ErrorCode::kMalformedInput);
  CHECK(error_of("<p>bad \xff byte</p>") == ErrorCode::kMalformedInput);
  CHECK(error_of("<h2>Only</h2><p>after heading.</p>") == ErrorCode::kEmptyLead);
  CHECK(error_of("<div>No paragraphs here.</div>") == ErrorCode::kEmptyLead);
  CHECK(error_of("<p><sup>[1]</sup></p>") == ErrorCode::kEmptyLead);
}

TEST_CASE("per-source boundary hook") {
  LeadRules rules = default_lead_rules(Source::kVikidia);
  rules.extra_boundary = [](const html::Node& n) { return n.has_class("section-break"); };
  const auto a = extract_lead_text(
      RawDocument{"<p>Kept.</p><div class=\"section-break\"></div><p>Dropped.</p>", "T", "fr",
                  Source::kVikidia},
      rules);
  CHECK(a.text == "Kept.");
}

TEST_CASE("h3 does not end the lead") {
  CHECK(lead("<p>A a.</p><h3>Sub</h3><p>B b.</p><h2>X</h2>").text == "A a.\nB b.");
}

TEST_CASE("golden fixtures reproduce byte-exactly") {
  const fs::path dir = fs::path(READRANK_FIXTURES) / "html";
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".html") continue;
    const std::string stem = entry.path().stem().string();
    const Source source = stem.find("klexikon") != std::string::npos ? Source::kKlexikon
                                                                      : Source::kWikipedia;
    const std::string lang = source == Source::kKlexikon ? "de" : "en";
    const auto a = extract_lead_text(
        RawDocument{io::read_file(entry.path()), stem, lang, source});
    const std::string golden = io::read_file(dir / (stem + ".txt"));
    CAPTURE(stem);
    CHECK(a.text == golden);
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("property: plain text in one paragraph is returned unchanged") {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    std::string text = random_text(rng);
    // Canonical form: single spaces, no leading/trailing space.
    std::string canonical;
    for (char c : text) {
      if (c == ' ' && (canonical.empty() || canonical.back() == ' ')) continue;
      canonical += c;
    }
    while (!canonical.empty() && canonical.back() == ' ') canonical.pop_back();
    if (canonical.empty()) continue;
    std::string escaped;
    for (char c : canonical) escaped += c == '"' ? std::string("&quot;") : std::string(1, c);
    CAPTURE(canonical);
    CHECK(lead("<p>" + escaped + "</p>").text == canonical);
  }
}

TEST_CASE("sentence splitting examples") {
  CHECK(split_sentences("A b. C d.", "en") == std::vector<std::string>{"A b.", "C d."});
  CHECK(split_sentences("It was 3.5 km long.", "en").size() == 1);
  CHECK(split_sentences("Dr. Smith arrived. He left.", "en") ==
        std::vector<std::string>{"Dr. Smith arrived.", "He left."});
  CHECK(split_sentences("", "en").empty());
  CHECK(split_sentences("   ", "en").empty());
}

TEST_CASE("sentence splitting guards and scripts") {
  CHECK(split_sentences("J. R. R. Tolkien wrote books. They sold well.", "en").size() == 2);
  CHECK(split_sentences("He said \"Stop!\" Then he left.", "en").size() == 2);
  CHECK(split_sentences("Is it? (Yes.) Fine.", "en").size() == 3);
  CHECK(split_sentences("the end. lowercase start.", "en").size() == 1);
  CHECK(split_sentences("Wait… Then go.", "en").size() == 2);
  CHECK(split_sentences("Τι κάνεις; Καλά.", "el").size() == 2);
  CHECK(split_sentences("Τι κάνεις; Καλά.", "el").size() == 2);
  CHECK(split_sentences("A; B.", "en").size() == 1);
  CHECK(split_sentences("Բարեւ։ Ինչպես ես։", "hy").size() == 2);
  CHECK(split_sentences("今日は晴れ。明日は雨！", "ja").size() == 2);
  CHECK(split_sentences("Line one\nLine two", "en").size() == 2);
  CHECK(split_sentences("Er kam z.B. spät. Dann ging er.", "de").size() == 2);
}

TEST_CASE("property: segmentation is total, non-empty and whitespace-faithful") {
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const std::string text = random_text(rng);
    const auto s1 = split_sentences(text, "en");
    CHECK(s1 == split_sentences(text, "en"));
    std::string joined;
    for (const auto& s : s1) {
      CHECK(!s.empty());
      joined += s + " ";
    }
    CHECK(squash(joined) == squash(text));
    if (!squash(text).empty()) CHECK(!s1.empty());
  }
}

TEST_CASE("abbreviation lists are data files") {
  const auto set = AbbreviationSet::parse("# comment\nDr.\n  e.g.  \n\nMrs\n");
  CHECK(set.size() == 3);
  CHECK(set.contains(U"dr"));
  CHECK(set.contains(U"e.g"));
  CHECK(set.contains(U"mrs"));
  for (const char* lang : {"en", "fr", "de", "es", "it", "nl", "pt", "ru", "eu", "ca", "el", "hy"}) {
    CAPTURE(lang);
    CHECK(abbreviations_for(lang).size() > 0);
  }
  AbbreviationSet custom;
  custom.add("Approx.");
  CHECK(split_sentences("Approx. Ten people came.", "en", custom).size() == 1);
  CHECK(split_sentences("Approx. Ten people came.", "en", AbbreviationSet{}).size() == 2);
}

TEST_CASE("syllable counts") {
  CHECK(count_syllables("cat", "en") == 1);
  CHECK(count_syllables("readability", "en") == 5);
  CHECK(count_syllables("make", "en") == 1);
  CHECK(count_syllables("table", "en") == 2);
  CHECK(count_syllables("yes", "en") == 1);
  CHECK(count_syllables("rhythm", "en") == 1);
  CHECK(count_syllables("the", "en") == 1);
  CHECK(count_syllables("Haus", "de") == 1);
  CHECK(count_syllables("Kaffee", "de") == 2);
  CHECK(count_syllables("молоко", "ru") == 3);
  CHECK(count_syllables("θάλασσα", "el") == 3);
  // Fallback: no vowel grouping for Han characters.
  CHECK(count_syllables("漢字漢字漢字", "zh") == 2);
  CHECK(count_syllables("字", "zh") == 1);
}

TEST_CASE("property: every non-empty word has at least one syllable") {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const std::string w = random_word(rng);
    CHECK(count_syllables(w, "en") >= 1);
    CHECK(count_syllables(w, "de") >= 1);
  }
}

TEST_CASE("ArticleText JSONL round trip") {
  const auto a = make_article_text("Title", "en", Source::kSimplewiki, "One a. Two b. Three c.");
  CHECK(a.num_sentences == 3);
  CHECK(a.num_chars == 22);
  const Json j = a;
  CHECK(j.dump() ==
        R"({"title":"Title","lang":"en","source":"simplewiki","text":"One a. Two b. Three c.",)"
        R"("sentences":["One a.","Two b.","Three c."],"num_chars":22,"num_sentences":3})");
  CHECK(j.get<ArticleText>() == a);

  Json missing = j;
  missing.erase("sentences");
  missing.erase("num_sentences");
  CHECK(missing.get<ArticleText>() == a);

  Json wrong = j;
  wrong["num_sentences"] = 2;
  CHECK_THROWS_AS(wrong.get<ArticleText>(), Error);
}

TEST_CASE("html entity decoding") {
  CHECK(html::decode_entities("&amp;&lt;&gt;&quot;&#39;&#x41;&eacute;&nbsp;") ==
        "&<>\"'Aé ");
  CHECK(html::decode_entities("&unknown; & plain") == "&unknown; & plain");
}
