#include "readrank/resources.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "readrank/error.hpp"
#include "readrank/utf8.hpp"

namespace readrank {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view field, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string s(trim(field));
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat,
                "bad number for " + std::string(what) + ": '" +
                    std::string(field) + "'");
  }
}

}  // namespace

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("READRANK_DATA_DIR"); env && *env) {
    return env;
  }
  return READRANK_DEFAULT_DATA_DIR;
}

AbbreviationSet AbbreviationSet::parse(std::string_view contents) {
  AbbreviationSet set;
  for (std::string_view line : split(contents, '\n')) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (!line.empty()) set.add(line);
  }
  return set;
}

AbbreviationSet AbbreviationSet::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

void AbbreviationSet::add(std::string_view token) {
  std::u32string t = utf8::to_lower(utf8::decode(token));
  while (!t.empty() && t.back() == U'.') t.pop_back();
  if (!t.empty()) entries_.insert(std::move(t));
}

bool AbbreviationSet::contains(std::u32string_view token) const {
  const std::u32string t = utf8::to_lower(token);
  return entries_.find(std::u32string_view(t)) != entries_.end();
}

const AbbreviationSet& abbreviations_for(std::string_view lang) {
  static std::mutex mu;
  static std::unordered_map<std::string, AbbreviationSet> cache;
  std::lock_guard lock(mu);
  const std::string key(lang);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  AbbreviationSet set;
  const auto path = data_dir() / "abbrev" / (key + ".txt");
  if (!key.empty() && key.find('/') == std::string::npos &&
      std::filesystem::exists(path)) {
    set = AbbreviationSet::load(path);
  }
  return cache.emplace(key, std::move(set)).first->second;
}

FreTable FreTable::parse(std::string_view contents) {
  FreTable table;
  for (std::string_view line : split(contents, '\n')) {
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto pos = t.find("version:");
      if (pos != std::string_view::npos && table.version_.empty()) {
        table.version_ = std::string(trim(t.substr(pos + 8)));
      }
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() < 4) {
      throw Error(ErrorCode::kFormat,
                  "coefficient row needs lang, A, B, C: '" + std::string(t) + "'");
    }
    FreCoefficients row;
    row.lang = std::string(trim(fields[0]));
    row.base = parse_double(fields[1], "A");
    row.sentence_length = parse_double(fields[2], "B");
    row.word_length = parse_double(fields[3], "C");
    if (fields.size() > 4) row.source = std::string(trim(fields[4]));
    table.rows_[row.lang] = row;
  }
  if (!table.has("en")) {
    throw Error(ErrorCode::kFormat, "coefficient table lacks the 'en' row");
  }
  return table;
}

FreTable FreTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

bool FreTable::has(std::string_view lang) const {
  return rows_.find(lang) != rows_.end();
}

const FreCoefficients& FreTable::lookup(std::string_view lang) const {
  if (auto it = rows_.find(lang); it != rows_.end()) return it->second;
  return rows_.find(std::string_view("en"))->second;
}

const FreTable& default_fre_table() {
  static const FreTable table =
      FreTable::load(data_dir() / "fre_coefficients.tsv");
  return table;
}

}  // namespace readrank
