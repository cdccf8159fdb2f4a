#include "readrank/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "readrank/error.hpp"
#include "readrank/io.hpp"
#include "readrank/rng.hpp"
#include "readrank/utf8.hpp"

namespace readrank {
namespace {

const std::vector<std::string>& default_title_patterns() {
  static const std::vector<std::string> patterns = {
      R"(\(disambiguation\)$)",      R"(^Lists? of )",
      R"(\(homonymie\)$)",           R"(^Liste d)",
      R"(\(Begriffsklärung\)$)",     R"(^Liste )",
      R"(\(desambiguación\)$)",      R"(^Anexo:)",
      R"(\(disambigua\)$)",          R"(^Lista d)",
      R"(\(doorverwijspagina\)$)",   R"(^Lijst van )",
      R"(\(значения\)$)",            R"(^Список )",
      R"(\(argipena\)$)",            R"(^.* zerrenda$)",
      R"(\(desambiguació\)$)",       R"(^Llista d)",
      R"(\(αποσαφήνιση\)$)",         R"(^Κατάλογος )",
      R"(\(այլ կիրառումներ\)$)",     R"(^Ցանկ )"};
  return patterns;
}

Source easy_source_for(std::string_view dataset) {
  const std::string_view prefix = dataset.substr(0, dataset.find('-'));
  try {
    return parse_source(prefix);
  } catch (const Error&) {
    return Source::kOther;
  }
}

ArticlePair make_pair(std::string_view dataset,
                      const std::optional<std::string>& wikidata_id,
                      const ArticleText& easy, const ArticleText& hard) {
  if (easy.lang != hard.lang) {
    throw Error(ErrorCode::kFormat, "language mismatch between '" + easy.title +
                                        "' (" + easy.lang + ") and '" +
                                        hard.title + "' (" + hard.lang + ")");
  }
  ArticlePair p;
  p.pair_id = make_pair_id(dataset, wikidata_id, hard.title);
  p.wikidata_id = wikidata_id;
  p.lang = hard.lang;
  p.dataset = std::string(dataset);
  p.easy = easy;
  p.hard = hard;
  return p;
}

Json side_to_json(const ArticleText& a) {
  return Json{{"title", a.title}, {"text", a.text}, {"sentences", a.sentences}};
}

ArticleText side_from_json(const Json& j, const std::string& lang,
                           Source source) {
  ArticleText a;
  a.title = j.value("title", std::string());
  a.lang = lang;
  a.source = source;
  a.text = j.at("text").get<std::string>();
  if (j.contains("sentences") && !j.at("sentences").is_null()) {
    a.sentences = j.at("sentences").get<std::vector<std::string>>();
  } else {
    a.sentences = split_sentences(a.text, lang);
  }
  a.num_sentences = a.sentences.size();
  a.num_chars = utf8::length(a.text);
  return a;
}

std::string json_string(const Json& row, const std::string& key) {
  if (key.empty() || !row.contains(key) || row.at(key).is_null()) return {};
  const Json& v = row.at(key);
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string_view skip_reason_name(SkipReason reason) {
  switch (reason) {
    case SkipReason::kAmbiguous: return "ambiguous";
    case SkipReason::kUnmatched: return "unmatched";
    case SkipReason::kTooShort: return "too_short";
    case SkipReason::kDisambiguation: return "disambiguation";
  }
  return "unmatched";
}

std::size_t MatchResult::count(SkipReason reason) const {
  return static_cast<std::size_t>(
      std::count_if(skips.begin(), skips.end(),
                    [&](const SkipEntry& s) { return s.reason == reason; }));
}

void to_json(Json& j, const SideRecord& r) {
  to_json(j, r.article);
  j["wikidata_id"] = r.wikidata_id ? Json(*r.wikidata_id) : Json(nullptr);
  j["redirects"] = r.redirects;
  j["namespace"] = r.namespace_id;
  j["page_props"] = r.page_props;
}

void from_json(const Json& j, SideRecord& r) {
  r.article = j.get<ArticleText>();
  r.wikidata_id.reset();
  if (j.contains("wikidata_id") && j.at("wikidata_id").is_string() &&
      !j.at("wikidata_id").get<std::string>().empty()) {
    r.wikidata_id = j.at("wikidata_id").get<std::string>();
  }
  r.redirects = j.value("redirects", std::vector<std::string>{});
  r.namespace_id = j.value("namespace", 0);
  r.page_props = j.value("page_props", std::set<std::string>{});
}

PageFilter::PageFilter() : PageFilter(default_title_patterns()) {}

PageFilter::PageFilter(std::vector<std::string> title_patterns) {
  for (const auto& p : title_patterns) patterns_.emplace_back(p);
}

bool PageFilter::excluded(const SideRecord& record) const {
  if (record.page_props.count("disambiguation") != 0 ||
      record.page_props.count("list") != 0) {
    return true;
  }
  return std::any_of(patterns_.begin(), patterns_.end(), [&](const std::regex& re) {
    return std::regex_search(record.article.title, re);
  });
}

std::string normalize_title(std::string_view title) {
  std::u32string t = utf8::decode(title);
  std::u32string out;
  bool pending = false;
  for (char32_t c : t) {
    if (c == U'_' || utf8::is_space(c)) {
      pending = true;
      continue;
    }
    if (pending && !out.empty()) out.push_back(U' ');
    pending = false;
    out.push_back(c);
  }
  if (!out.empty()) out[0] = utf8::to_upper(out[0]);
  return utf8::encode(out);
}

std::string make_pair_id(std::string_view dataset,
                         const std::optional<std::string>& wikidata_id,
                         std::string_view hard_title) {
  std::string key;
  if (wikidata_id && !wikidata_id->empty()) {
    key = *wikidata_id;
  } else {
    key = normalize_title(hard_title);
    std::replace(key.begin(), key.end(), ' ', '_');
  }
  return std::string(dataset) + ":" + key;
}

bool passes_length_filter(const ArticleText& easy, const ArticleText& hard) {
  return easy.num_sentences >= kMinSentencesPerSide &&
         hard.num_sentences >= kMinSentencesPerSide;
}

MatchResult match_by_wikidata(const std::vector<SideRecord>& hard_set,
                              const std::vector<SideRecord>& easy_set,
                              std::string_view dataset,
                              const PageFilter& filter) {
  MatchResult result;
  using Index = std::unordered_map<std::string, std::size_t>;
  const auto build = [&](const std::vector<SideRecord>& side, std::string_view name) {
    Index index;
    for (std::size_t i = 0; i < side.size(); ++i) {
      const auto& id = side[i].wikidata_id;
      if (!id || id->empty()) {
        result.skips.push_back({side[i].article.title, SkipReason::kUnmatched});
        continue;
      }
      auto [it, inserted] = index.emplace(*id, i);
      if (!inserted && side[it->second].article.text != side[i].article.text) {
        throw Error(ErrorCode::kDuplicateId, "wikidata id " + *id +
                                                 " appears twice with different "
                                                 "texts in the " +
                                                 std::string(name) + " set");
      }
    }
    return index;
  };
  const Index hard_index = build(hard_set, "hard");
  const Index easy_index = build(easy_set, "easy");

  std::vector<bool> easy_used(easy_set.size(), false);
  for (std::size_t h = 0; h < hard_set.size(); ++h) {
    const SideRecord& hard = hard_set[h];
    if (!hard.wikidata_id || hard_index.at(*hard.wikidata_id) != h) continue;
    if (filter.excluded(hard)) {
      result.skips.push_back({hard.article.title, SkipReason::kDisambiguation});
      continue;
    }
    const auto it = easy_index.find(*hard.wikidata_id);
    if (it == easy_index.end()) {
      result.skips.push_back({hard.article.title, SkipReason::kUnmatched});
      continue;
    }
    easy_used[it->second] = true;
    const SideRecord& easy = easy_set[it->second];
    if (filter.excluded(easy)) {
      result.skips.push_back({easy.article.title, SkipReason::kDisambiguation});
      continue;
    }
    if (!passes_length_filter(easy.article, hard.article)) {
      result.skips.push_back({hard.article.title, SkipReason::kTooShort});
      continue;
    }
    result.pairs.push_back(
        make_pair(dataset, hard.wikidata_id, easy.article, hard.article));
  }
  for (std::size_t e = 0; e < easy_set.size(); ++e) {
    const auto& id = easy_set[e].wikidata_id;
    if (easy_used[e] || !id || easy_index.at(*id) != e) continue;
    result.skips.push_back({easy_set[e].article.title,
                            filter.excluded(easy_set[e]) ? SkipReason::kDisambiguation
                                                         : SkipReason::kUnmatched});
  }
  return result;
}

TitleIndex TitleIndex::build(
    std::vector<SideRecord> records,
    const std::vector<std::pair<std::string, std::string>>& redirect_edges) {
  TitleIndex index;
  index.records_ = std::move(records);
  index.title_sets_.resize(index.records_.size());
  std::map<std::string, std::size_t> canonical;
  for (std::size_t i = 0; i < index.records_.size(); ++i) {
    const auto& r = index.records_[i];
    const std::string key = normalize_title(r.article.title);
    index.title_sets_[i].insert(key);
    canonical.emplace(key, i);
    for (const auto& alias : r.redirects) {
      index.title_sets_[i].insert(normalize_title(alias));
    }
  }

  std::map<std::string, std::string> edges;
  for (const auto& [from, to] : redirect_edges) {
    edges[normalize_title(from)] = normalize_title(to);
  }
  for (const auto& [from, first] : edges) {
    std::string target = first;
    for (std::size_t hops = 0; hops <= edges.size(); ++hops) {
      if (canonical.count(target) != 0) break;
      const auto next = edges.find(target);
      if (next == edges.end()) break;
      target = next->second;
    }
    if (const auto it = canonical.find(target); it != canonical.end()) {
      index.title_sets_[it->second].insert(from);
    }
  }

  for (std::size_t i = 0; i < index.title_sets_.size(); ++i) {
    for (const auto& t : index.title_sets_[i]) {
      auto [it, inserted] = index.lookup_.emplace(t, i);
      if (!inserted && it->second != i) {
        it->second = SIZE_MAX;  // alias shared by several articles
      }
    }
  }
  return index;
}

std::optional<std::size_t> TitleIndex::resolve(std::string_view title) const {
  const auto it = lookup_.find(normalize_title(title));
  if (it == lookup_.end() || it->second == SIZE_MAX) return std::nullopt;
  return it->second;
}

namespace {

std::map<std::string, std::vector<std::size_t>> alias_map(
    const TitleIndex& index, const std::vector<bool>& excluded) {
  std::map<std::string, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < index.records().size(); ++i) {
    if (excluded[i]) continue;
    for (const auto& t : index.titles_of(i)) out[t].push_back(i);
  }
  return out;
}

std::set<std::size_t> candidates_via(
    const std::set<std::string>& titles,
    const std::map<std::string, std::vector<std::size_t>>& aliases) {
  std::set<std::size_t> out;
  for (const auto& t : titles) {
    if (const auto it = aliases.find(t); it != aliases.end()) {
      out.insert(it->second.begin(), it->second.end());
    }
  }
  return out;
}

}  // namespace

MatchResult match_by_title(const TitleIndex& hard_index,
                           const TitleIndex& easy_index,
                           std::string_view dataset, const PageFilter& filter) {
  MatchResult result;
  const auto& hards = hard_index.records();
  const auto& easies = easy_index.records();
  std::vector<bool> hard_excluded(hards.size());
  std::vector<bool> easy_excluded(easies.size());
  for (std::size_t i = 0; i < hards.size(); ++i) hard_excluded[i] = filter.excluded(hards[i]);
  for (std::size_t i = 0; i < easies.size(); ++i) easy_excluded[i] = filter.excluded(easies[i]);

  const auto hard_aliases = alias_map(hard_index, hard_excluded);
  const auto easy_aliases = alias_map(easy_index, easy_excluded);

  for (std::size_t e = 0; e < easies.size(); ++e) {
    const auto& easy = easies[e];
    if (easy_excluded[e]) {
      result.skips.push_back({easy.article.title, SkipReason::kDisambiguation});
      continue;
    }
    const auto forward = candidates_via(easy_index.titles_of(e), hard_aliases);
    if (forward.empty()) {
      result.skips.push_back({easy.article.title, SkipReason::kUnmatched});
      continue;
    }
    if (forward.size() > 1) {
      result.skips.push_back({easy.article.title, SkipReason::kAmbiguous});
      continue;
    }
    const std::size_t h = *forward.begin();
    const auto backward = candidates_via(hard_index.titles_of(h), easy_aliases);
    if (backward.size() != 1) {
      result.skips.push_back({easy.article.title, SkipReason::kAmbiguous});
      continue;
    }
    const auto& hard = hards[h];
    if (!passes_length_filter(easy.article, hard.article)) {
      result.skips.push_back({easy.article.title, SkipReason::kTooShort});
      continue;
    }
    auto id = hard.wikidata_id ? hard.wikidata_id : easy.wikidata_id;
    result.pairs.push_back(make_pair(dataset, id, easy.article, hard.article));
  }
  return result;
}

MatchResult match_txikipedia(const std::vector<SideRecord>& articles,
                             std::string_view dataset) {
  static constexpr std::string_view kPrefix = "Txikipedia:";
  MatchResult result;
  std::map<std::string, std::size_t> main_ns;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    const auto& r = articles[i];
    if (r.namespace_id != 0 && r.namespace_id != 104) {
      throw Error(ErrorCode::kFormat, "namespace " + std::to_string(r.namespace_id) +
                                          " is neither 0 nor 104 for '" +
                                          r.article.title + "'");
    }
    if (r.namespace_id == 0) main_ns.emplace(normalize_title(r.article.title), i);
  }
  for (const auto& r : articles) {
    if (r.namespace_id != 104) continue;
    std::string_view title = r.article.title;
    if (title.substr(0, kPrefix.size()) == kPrefix) title.remove_prefix(kPrefix.size());
    const auto it = main_ns.find(normalize_title(title));
    if (it == main_ns.end()) {
      result.skips.push_back({r.article.title, SkipReason::kUnmatched});
      continue;
    }
    const SideRecord& hard = articles[it->second];
    if (!passes_length_filter(r.article, hard.article)) {
      result.skips.push_back({r.article.title, SkipReason::kTooShort});
      continue;
    }
    auto id = hard.wikidata_id ? hard.wikidata_id : r.wikidata_id;
    result.pairs.push_back(make_pair(dataset, id, r.article, hard.article));
  }
  return result;
}

std::map<std::size_t, std::size_t> cooccurrence_report(
    const std::vector<std::vector<ArticlePair>>& datasets) {
  std::map<std::string, std::set<std::size_t>> seen;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (const auto& p : datasets[d]) {
      if (p.wikidata_id && !p.wikidata_id->empty()) seen[*p.wikidata_id].insert(d);
    }
  }
  std::map<std::size_t, std::size_t> histogram;
  for (const auto& [id, where] : seen) {
    if (where.size() >= 2) ++histogram[where.size()];
  }
  return histogram;
}

TrainTestSplit split_train_test(const std::vector<ArticlePair>& pairs,
                                double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidRequest, "train fraction must lie in (0, 1)");
  }
  // Groups in order of first appearance.
  std::vector<std::vector<std::size_t>> groups;
  std::unordered_map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& id = pairs[i].wikidata_id;
    if (id && !id->empty()) {
      auto [it, inserted] = group_of.emplace(*id, groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(i);
    } else {
      groups.push_back({i});
    }
  }
  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  Rng rng = Rng::substream(seed, "split");
  rng.shuffle(order.begin(), order.end());

  const auto target = static_cast<std::size_t>(
      std::floor(static_cast<double>(pairs.size()) * train_fraction));
  std::vector<bool> in_train(pairs.size(), false);
  std::size_t train_size = 0;
  for (std::size_t g : order) {
    if (train_size + groups[g].size() > target) continue;
    for (std::size_t i : groups[g]) in_train[i] = true;
    train_size += groups[g].size();
  }
  TrainTestSplit split;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (in_train[i] ? split.train : split.test).push_back(pairs[i]);
  }
  return split;
}

Json pair_to_json(const ArticlePair& p) {
  return Json{{"pair_id", p.pair_id},
              {"wikidata_id", p.wikidata_id ? Json(*p.wikidata_id) : Json(nullptr)},
              {"lang", p.lang},
              {"dataset", p.dataset},
              {"easy", side_to_json(p.easy)},
              {"hard", side_to_json(p.hard)}};
}

ArticlePair pair_from_json(const Json& j) {
  ArticlePair p;
  p.pair_id = j.at("pair_id").get<std::string>();
  if (j.contains("wikidata_id") && j.at("wikidata_id").is_string()) {
    p.wikidata_id = j.at("wikidata_id").get<std::string>();
  }
  p.lang = j.at("lang").get<std::string>();
  p.dataset = j.at("dataset").get<std::string>();
  p.easy = side_from_json(j.at("easy"), p.lang, easy_source_for(p.dataset));
  p.hard = side_from_json(j.at("hard"), p.lang, Source::kWikipedia);
  return p;
}

std::vector<ArticlePair> read_pairs(const std::string& path) {
  std::vector<ArticlePair> pairs;
  std::set<std::string> ids;
  for (const auto& row : io::read_jsonl(path)) {
    try {
      pairs.push_back(pair_from_json(row));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat, path + ": bad pair record: " + e.what());
    }
    if (!ids.insert(pairs.back().dataset + "\n" + pairs.back().pair_id).second) {
      throw Error(ErrorCode::kFormat, path + ": duplicate pair_id " + pairs.back().pair_id);
    }
  }
  return pairs;
}

void write_pairs(const std::string& path, const std::vector<ArticlePair>& pairs) {
  std::vector<Json> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) rows.push_back(pair_to_json(p));
  io::write_file_atomic(path, io::to_jsonl(rows));
}

Json skip_to_json(const SkipEntry& skip) {
  return Json{{"title", skip.title}, {"reason", skip_reason_name(skip.reason)}};
}

IngestResult ingest_published(const std::vector<Json>& rows,
                              const PairFieldMapping& mapping,
                              std::string_view default_dataset,
                              std::string_view default_lang,
                              bool enforce_min_sentences) {
  IngestResult result;
  std::map<std::string, std::size_t> used_ids;
  for (const auto& row : rows) {
    std::string lang = json_string(row, mapping.lang);
    if (lang.empty()) lang = std::string(default_lang);
    std::string dataset = json_string(row, mapping.dataset);
    if (dataset.empty()) dataset = std::string(default_dataset);
    if (lang.empty() || dataset.empty()) {
      throw Error(ErrorCode::kFormat, "row lacks lang/dataset and no default was given");
    }
    const std::string easy_text = json_string(row, mapping.easy_text);
    const std::string hard_text = json_string(row, mapping.hard_text);
    if (easy_text.empty() || hard_text.empty()) {
      throw Error(ErrorCode::kFormat, "row lacks '" + mapping.easy_text + "' or '" +
                                          mapping.hard_text + "'");
    }
    std::optional<std::string> wikidata;
    if (std::string id = json_string(row, mapping.wikidata_id); !id.empty()) {
      wikidata = std::move(id);
    }
    ArticleText easy = make_article_text(json_string(row, mapping.easy_title), lang,
                                         easy_source_for(dataset), easy_text);
    ArticleText hard = make_article_text(json_string(row, mapping.hard_title), lang,
                                         Source::kWikipedia, hard_text);
    if (enforce_min_sentences && !passes_length_filter(easy, hard)) {
      ++result.dropped_too_short;
      continue;
    }
    ArticlePair p = make_pair(dataset, wikidata, easy, hard);
    const std::size_t n = ++used_ids[p.pair_id];
    if (n > 1) p.pair_id += "~" + std::to_string(n);
    result.pairs.push_back(std::move(p));
  }
  return result;
}

std::vector<Json> load_table_rows(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  if (ext == ".csv" || ext == ".tsv") {
    const io::CsvTable table = io::parse_csv(io::read_file(path), ext == ".tsv" ? '\t' : ',');
    std::vector<Json> rows;
    rows.reserve(table.rows.size());
    for (const auto& r : table.rows) {
      Json obj = Json::object();
      for (std::size_t c = 0; c < table.header.size(); ++c) obj[table.header[c]] = r[c];
      rows.push_back(std::move(obj));
    }
    return rows;
  }
  return io::read_jsonl(path);
}

}  // namespace readrank
