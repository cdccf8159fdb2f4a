#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace readrank {

// Root of the editable language data (abbreviation lists, formula
// coefficients). READRANK_DATA_DIR overrides the compiled-in default.
std::filesystem::path data_dir();

// Lowercased abbreviation tokens without their final period ("dr", "e.g").
class AbbreviationSet {
 public:
  AbbreviationSet() = default;

  // One token per line, '#' starts a comment.
  static AbbreviationSet parse(std::string_view contents);
  static AbbreviationSet load(const std::filesystem::path& path);

  void add(std::string_view token);
  bool contains(std::u32string_view token) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::u32string, std::less<>> entries_;
};

// Cached per-language list from data_dir()/abbrev/<lang>.txt; empty for
// languages without a list.
const AbbreviationSet& abbreviations_for(std::string_view lang);

struct FreCoefficients {
  std::string lang;
  double base = 0.0;              // A
  double sentence_length = 0.0;   // B, per word/sentence
  double word_length = 0.0;       // C, per syllable/word
  std::string source;
};

class FreTable {
 public:
  // Tab-separated: lang, A, B, C, source. '#' lines are comments; the
  // first such comment may carry "version: N".
  static FreTable parse(std::string_view contents);
  static FreTable load(const std::filesystem::path& path);

  // Unknown languages fall back to "en".
  const FreCoefficients& lookup(std::string_view lang) const;
  bool has(std::string_view lang) const;
  const std::string& version() const { return version_; }

 private:
  std::map<std::string, FreCoefficients, std::less<>> rows_;
  std::string version_;
};

const FreTable& default_fre_table();

}  // namespace readrank
