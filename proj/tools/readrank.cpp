#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "readrank/classifier.hpp"
#include "readrank/corpus.hpp"
#include "readrank/error.hpp"
#include "readrank/evalkit.hpp"
#include "readrank/features.hpp"
#include "readrank/fetcher.hpp"
#include "readrank/io.hpp"
#include "readrank/ranker.hpp"
#include "readrank/service.hpp"
#include "readrank/synthetic.hpp"
#include "readrank/textkit.hpp"

namespace fs = std::filesystem;
using namespace readrank;

namespace {

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kUpstreamFailure = 4 };

// Files written by the current command; removed if it fails.
std::vector<fs::path> g_written;

void write_output(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  io::write_file_atomic(path, contents);
  g_written.push_back(path);
}

struct RunManifest {
  std::string command;
  Json config = Json::object();
  std::uint64_t seed = 0;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();

  void write(const fs::path& primary) const {
    const auto finished = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(started);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    Json j{{"command", command},
           {"tool_version", READRANK_VERSION},
           {"feature_set", kFeatureSetVersion},
           {"seed", seed},
           {"config", config},
           {"inputs", inputs},
           {"outputs", outputs},
           {"started_at", stamp},
           {"wall_clock_s",
            std::chrono::duration<double>(finished - started).count()}};
    write_output(primary.string() + ".manifest.json", j.dump(2) + "\n");
  }
};

std::string dump_line(const Json& j) { return j.dump() + "\n"; }

std::string jsonl(const std::vector<Json>& rows) { return io::to_jsonl(rows); }

bool is_html_path(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".html" || ext == ".htm";
}

std::vector<fs::path> list_html(const fs::path& in) {
  std::vector<fs::path> out;
  if (fs::is_directory(in)) {
    for (const auto& e : fs::directory_iterator(in)) {
      if (e.is_regular_file() && is_html_path(e.path())) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
  } else if (fs::exists(in)) {
    out.push_back(in);
  } else {
    throw Error(ErrorCode::kIo, "no such input: " + in.string());
  }
  return out;
}

// ---- extract ----

struct ExtractOptions {
  std::string in;
  std::string lang;
  std::string source = "wikipedia";
  std::string out;
  bool strict = false;
};

int run_extract(const ExtractOptions& o) {
  const Source source = parse_source(o.source);
  const LeadRules rules = default_lead_rules(source);
  std::vector<Json> rows;
  Json failures = Json::array();
  RunManifest manifest{"extract"};
  for (const auto& path : list_html(o.in)) {
    manifest.inputs.push_back(path.string());
    SideRecord record;
    RawDocument doc{io::read_file(path), path.stem().string(), o.lang, source};
    // Sidecar: name.meta.json next to name.html.
    const fs::path sidecar = fs::path(path).replace_extension(".meta.json");
    Json meta = Json::object();
    if (fs::exists(sidecar)) {
      meta = Json::parse(io::read_file(sidecar));
      doc.title = meta.value("title", doc.title);
    }
    try {
      record.article = extract_lead_text(doc, rules);
    } catch (const Error& e) {
      if (o.strict || (e.code() != ErrorCode::kEmptyLead &&
                       e.code() != ErrorCode::kMalformedInput)) {
        throw;
      }
      failures.push_back(Json{{"file", path.filename().string()},
                              {"code", std::string(error_code_name(e.code()))}});
      continue;
    }
    if (meta.contains("wikidata_id") && meta["wikidata_id"].is_string()) {
      record.wikidata_id = meta["wikidata_id"].get<std::string>();
    }
    record.redirects = meta.value("redirects", std::vector<std::string>{});
    record.namespace_id = meta.value("namespace", 0);
    record.page_props = meta.value("page_props", std::set<std::string>{});
    rows.push_back(Json(record));
  }
  write_output(o.out, jsonl(rows));
  manifest.config = Json{{"lang", o.lang}, {"source", o.source}, {"strict", o.strict},
                         {"extracted", rows.size()}, {"failures", failures}};
  manifest.outputs = {o.out};
  manifest.write(o.out);
  std::cerr << "extracted " << rows.size() << " articles, " << failures.size()
            << " skipped\n";
  return kOk;
}

// ---- build-dataset ----

std::vector<SideRecord> read_sides(const std::string& path) {
  std::vector<SideRecord> out;
  for (const auto& row : io::read_jsonl(path)) out.push_back(row.get<SideRecord>());
  return out;
}

std::vector<std::pair<std::string, std::string>> read_redirects(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> edges;
  if (path.empty()) return edges;
  const auto table = io::parse_csv(io::read_file(path), '\t');
  const int from = table.column("from");
  const int to = table.column("to");
  if (from < 0 || to < 0) throw Error(ErrorCode::kFormat, path + ": needs from/to columns");
  for (const auto& row : table.rows) edges.emplace_back(row.at(from), row.at(to));
  return edges;
}

struct BuildOptions {
  std::string hard;
  std::string easy;
  std::string match = "wikidata";
  std::string dataset;
  std::string out;
  std::string skip_report;
  std::string hard_redirects;
  std::string easy_redirects;
};

int run_build(const BuildOptions& o) {
  RunManifest manifest{"build-dataset"};
  MatchResult result;
  if (o.match == "wikidata") {
    if (o.easy.empty()) throw Error(ErrorCode::kInvalidRequest, "--easy is required");
    result = match_by_wikidata(read_sides(o.hard), read_sides(o.easy), o.dataset);
    manifest.inputs = {o.hard, o.easy};
  } else if (o.match == "title") {
    if (o.easy.empty()) throw Error(ErrorCode::kInvalidRequest, "--easy is required");
    const auto hard = TitleIndex::build(read_sides(o.hard), read_redirects(o.hard_redirects));
    const auto easy = TitleIndex::build(read_sides(o.easy), read_redirects(o.easy_redirects));
    result = match_by_title(hard, easy, o.dataset);
    manifest.inputs = {o.hard, o.easy};
  } else if (o.match == "txikipedia") {
    result = match_txikipedia(read_sides(o.hard), o.dataset.empty() ? "txikipedia-eu" : o.dataset);
    manifest.inputs = {o.hard};
  } else {
    throw Error(ErrorCode::kInvalidRequest, "unknown --match " + o.match);
  }
  std::vector<Json> rows;
  for (const auto& p : result.pairs) rows.push_back(pair_to_json(p));
  write_output(o.out, jsonl(rows));
  manifest.outputs = {o.out};
  if (!o.skip_report.empty()) {
    std::vector<Json> skips;
    for (const auto& s : result.skips) skips.push_back(skip_to_json(s));
    write_output(o.skip_report, jsonl(skips));
    manifest.outputs.push_back(o.skip_report);
  }
  Json counts = Json::object();
  for (auto r : {SkipReason::kAmbiguous, SkipReason::kUnmatched, SkipReason::kTooShort,
                 SkipReason::kDisambiguation}) {
    counts[std::string(skip_reason_name(r))] = result.count(r);
  }
  manifest.config = Json{{"match", o.match}, {"dataset", o.dataset},
                         {"pairs", result.pairs.size()}, {"skips", counts}};
  manifest.write(o.out);
  std::cerr << "matched " << result.pairs.size() << " pairs\n";
  return kOk;
}

// ---- split ----

struct SplitOptions {
  std::string pairs;
  double train_frac = 0.8;
  std::uint64_t seed = 0;
  std::string train_out;
  std::string test_out;
};

std::string with_suffix(const std::string& path, const std::string& suffix) {
  fs::path p(path);
  return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

int run_split(SplitOptions o) {
  if (o.train_out.empty()) o.train_out = with_suffix(o.pairs, ".train");
  if (o.test_out.empty()) o.test_out = with_suffix(o.pairs, ".test");
  const auto split = split_train_test(read_pairs(o.pairs), o.train_frac, o.seed);
  std::vector<Json> train_rows;
  std::vector<Json> test_rows;
  for (const auto& p : split.train) train_rows.push_back(pair_to_json(p));
  for (const auto& p : split.test) test_rows.push_back(pair_to_json(p));
  write_output(o.train_out, jsonl(train_rows));
  write_output(o.test_out, jsonl(test_rows));
  RunManifest manifest{"split"};
  manifest.seed = o.seed;
  manifest.inputs = {o.pairs};
  manifest.outputs = {o.train_out, o.test_out};
  manifest.config = Json{{"train_frac", o.train_frac},
                         {"n_train", split.train.size()},
                         {"n_test", split.test.size()}};
  manifest.write(o.train_out);
  return kOk;
}

// ---- train ----

struct TrainOptions {
  std::string pairs;
  std::string mode = "document";
  std::string out;
  TrainConfig config;
  ClassifierConfig classifier;
};

int run_train(TrainOptions o) {
  const auto pairs = read_pairs(o.pairs);
  RunManifest manifest{"train"};
  manifest.seed = o.config.seed;
  manifest.inputs = {o.pairs};
  manifest.outputs = {o.out};
  if (o.mode == "lfc") {
    o.classifier.seed = o.config.seed;
    const auto model = train_feature_classifier(pairs, o.classifier);
    write_output(o.out, classifier_to_json(model).dump(2) + "\n");
    manifest.config = Json{{"mode", "lfc"},
                           {"epochs", o.classifier.epochs},
                           {"learning_rate", o.classifier.learning_rate},
                           {"l2", o.classifier.l2},
                           {"batch_size", o.classifier.batch_size}};
  } else {
    o.config.mode = parse_mode(o.mode);
    const auto model = train(pairs, o.config);
    write_output(o.out, model_to_json(model).dump(2) + "\n");
    manifest.config = Json{{"mode", o.mode},
                           {"margin", o.config.margin},
                           {"epochs", o.config.epochs},
                           {"learning_rate", o.config.learning_rate},
                           {"weight_decay", o.config.weight_decay},
                           {"hidden_units", o.config.resolved_hidden_units()},
                           {"batch_size", o.config.batch_size},
                           {"val_fraction", o.config.val_fraction},
                           {"sentence_threshold", o.config.sentence_threshold},
                           {"best_epoch", model.meta.best_epoch}};
  }
  manifest.write(o.out);
  return kOk;
}

// ---- eval ----

struct ScorerHandle {
  Scorer fn;
  std::string name;
};

ScorerHandle make_scorer(const std::string& kind, const std::string& model_path) {
  if (kind == "fre") {
    // Negated so that higher means harder for every scorer.
    return {[](const ArticleText& t) { return -flesch_reading_ease(t, t.lang).value; }, "fre"};
  }
  if (kind == "fkgl") return {[](const ArticleText& t) { return fkgl(t).value; }, "fkgl"};
  if (kind == "ns") return {ns_baseline, "ns"};
  if (model_path.empty()) throw Error(ErrorCode::kInvalidRequest, "--model is required");
  if (kind == "model") {
    auto model = std::make_shared<ScorerModel>(load_model(model_path));
    return {[model](const ArticleText& t) { return score(*model, t); },
            "model:" + std::string(mode_name(model->mode))};
  }
  if (kind == "lfc") {
    auto model = std::make_shared<FeatureClassifier>(
        classifier_from_json(Json::parse(io::read_file(model_path))));
    return {[model](const ArticleText& t) { return classify(*model, featurize(t)); }, "lfc"};
  }
  throw Error(ErrorCode::kInvalidRequest, "unknown --scorer " + kind);
}

struct EvalOptions {
  std::string pairs;
  std::string scorer = "model";
  std::string model;
  std::size_t bootstrap = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out;
  std::string summary;
};

int run_eval(const EvalOptions& o) {
  const auto pairs = read_pairs(o.pairs);
  if (pairs.empty()) throw Error(ErrorCode::kDegenerateData, o.pairs + ": no pairs");
  const ScorerHandle scorer = make_scorer(o.scorer, o.model);
  EvalReport report = ranking_accuracy(scorer.fn, pairs);
  report.scorer = scorer.name;
  attach_bootstrap(report, o.bootstrap, o.seed, o.threads);
  write_output(o.out, report_to_json(report).dump(2) + "\n");
  RunManifest manifest{"eval"};
  manifest.seed = o.seed;
  manifest.inputs = {o.pairs};
  if (!o.model.empty()) manifest.inputs.push_back(o.model);
  manifest.outputs = {o.out};
  if (!o.summary.empty()) {
    write_output(o.summary, summary_header() + summary_row(report));
    manifest.outputs.push_back(o.summary);
  }
  manifest.config = Json{{"scorer", scorer.name}, {"bootstrap", o.bootstrap},
                         {"threads", o.threads}};
  manifest.write(o.out);
  std::cout << summary_row(report);
  return kOk;
}

// ---- score ----

struct ScoreOptions {
  std::string model;
  std::optional<std::string> text;
  std::string file;
  std::optional<std::string> title;
  std::string lang = "en";
  std::optional<std::int64_t> revision;
  std::string side_file;
  std::string out;
  std::string config;
};

Json score_row(const ScorerModel& model, const ArticleText& t) {
  Json row{{"title", t.title}, {"lang", t.lang}, {"score", score(model, t)},
           {"n_sentences", t.num_sentences}};
  try {
    row["fre"] = flesch_reading_ease(t, t.lang).value;
    row["fkgl"] = fkgl(t).value;
  } catch (const Error&) {
    row["fre"] = nullptr;
    row["fkgl"] = nullptr;
  }
  return row;
}

int run_score(const ScoreOptions& o) {
  auto model = std::make_shared<const ScorerModel>(load_model(o.model));
  if (!o.side_file.empty()) {
    if (o.out.empty()) throw Error(ErrorCode::kInvalidRequest, "--side-file needs --out");
    std::vector<Json> rows;
    for (const auto& t : read_article_jsonl(o.side_file)) rows.push_back(score_row(*model, t));
    write_output(o.out, jsonl(rows));
    RunManifest manifest{"score"};
    manifest.inputs = {o.model, o.side_file};
    manifest.outputs = {o.out};
    manifest.write(o.out);
    return kOk;
  }
  const int sources = (o.text ? 1 : 0) + (o.file.empty() ? 0 : 1) + (o.title ? 1 : 0);
  if (sources != 1) {
    throw Error(ErrorCode::kInvalidRequest, "give exactly one of --text, --file, --title");
  }
  ScoreResponse response;
  if (!o.file.empty()) {
    const std::string contents = io::read_file(o.file);
    const ArticleText t =
        is_html_path(o.file)
            ? extract_lead_text(RawDocument{contents, fs::path(o.file).stem().string(), o.lang,
                                            Source::kWikipedia})
            : make_article_text("", o.lang, Source::kOther, contents);
    response.score = score(*model, t);
    response.n_sentences = t.num_sentences;
    response.n_chars = t.num_chars;
    response.model_version = model->version;
    response.lang = o.lang;
  } else {
    const ServiceConfig config = load_service_config(o.config);
    auto fetcher = std::make_shared<ArticleFetcher>(config.fetcher, make_default_http_client());
    const ScoreService service(model, fetcher);
    response = service.score(ScoreRequest{o.text, o.title, o.lang, o.revision});
  }
  Json j = response_to_json(response);
  j.erase("elapsed_ms");
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---- stats ----

struct StatsOptions {
  std::string scores;
  std::string out;
  std::string plot_data;
};

int run_stats(const StatsOptions& o) {
  std::map<std::string, std::vector<double>> by_lang;
  std::map<std::string, std::vector<std::array<double, 3>>> with_formulas;
  for (const auto& row : io::read_jsonl(o.scores)) {
    const std::string lang = row.value("lang", "");
    const double s = row.at("score").get<double>();
    by_lang[lang].push_back(s);
    if (row.contains("fre") && row["fre"].is_number() && row.contains("fkgl") &&
        row["fkgl"].is_number()) {
      with_formulas[lang].push_back({s, row["fre"].get<double>(), row["fkgl"].get<double>()});
    }
  }
  Json languages = Json::array();
  std::string plot = "language\tn\tp2_5\tp25\tmedian\tp75\tp97_5\n";
  for (const auto& [lang, scores] : by_lang) {
    const DistributionReport d = distribution_report(scores, lang);
    Json entry = distribution_to_json(d);
    if (auto it = with_formulas.find(lang); it != with_formulas.end() && it->second.size() >= 3) {
      std::vector<double> s, fre, fk;
      for (const auto& v : it->second) {
        s.push_back(v[0]);
        fre.push_back(v[1]);
        fk.push_back(v[2]);
      }
      for (const auto& [name, values] : {std::pair{"fre", &fre}, std::pair{"fkgl", &fk}}) {
        try {
          const SpearmanResult r = spearman(s, *values);
          entry[std::string("spearman_") + name] = Json{{"rho", r.rho}, {"p_value", r.p_value}};
        } catch (const Error&) {
          entry[std::string("spearman_") + name] = nullptr;
        }
      }
    }
    languages.push_back(entry);
    std::ostringstream line;
    line << lang << '\t' << d.n << '\t' << d.p2_5 << '\t' << d.p25 << '\t' << d.median << '\t'
         << d.p75 << '\t' << d.p97_5 << '\n';
    plot += line.str();
  }
  write_output(o.out, Json{{"languages", languages}}.dump(2) + "\n");
  RunManifest manifest{"stats"};
  manifest.inputs = {o.scores};
  manifest.outputs = {o.out};
  if (!o.plot_data.empty()) {
    write_output(o.plot_data, plot);
    manifest.outputs.push_back(o.plot_data);
  }
  manifest.write(o.out);
  return kOk;
}

// ---- cooccur ----

int run_cooccur(const std::vector<std::string>& datasets, const std::string& out) {
  std::vector<std::vector<ArticlePair>> loaded;
  for (const auto& d : datasets) loaded.push_back(read_pairs(d));
  Json j = Json::object();
  for (const auto& [k, n] : cooccurrence_report(loaded)) j[std::to_string(k)] = n;
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return kOk;
  }
  write_output(out, text);
  RunManifest manifest{"cooccur"};
  manifest.inputs = datasets;
  manifest.outputs = {out};
  manifest.write(out);
  return kOk;
}

// ---- serve / bench ----

int run_serve(const std::string& config_path, std::string model_path, std::optional<int> port,
              std::optional<std::string> host) {
  ServiceConfig config = load_service_config(config_path);
  if (!model_path.empty()) config.model_path = model_path;
  if (port) config.port = *port;
  if (host) config.host = *host;
  std::shared_ptr<const ScorerModel> model;
  if (!config.model_path.empty()) {
    model = std::make_shared<const ScorerModel>(load_model(config.model_path));
  } else {
    std::cerr << "warning: no model configured; /v1/score will answer 503\n";
  }
  auto fetcher = std::make_shared<ArticleFetcher>(config.fetcher, make_default_http_client());
  ScoreService service(model, fetcher);
  service.set_default_lang(config.default_lang);
  std::cerr << "listening on " << config.host << ":" << config.port << "\n";
  run_server(service, config.host, config.port);
  return kOk;
}

struct BenchOptions {
  std::string model;
  std::size_t n = 1000;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::string texts;
  std::string out;
};

int run_bench(const BenchOptions& o) {
  auto model = std::make_shared<const ScorerModel>(load_model(o.model));
  std::vector<std::string> texts;
  if (!o.texts.empty()) {
    for (const auto& t : read_article_jsonl(o.texts)) {
      if (texts.size() == o.n) break;
      texts.push_back(t.text);
    }
  } else {
    texts = synthetic_lead_texts(o.n, o.seed);
  }
  const ScoreService service(model, nullptr);
  const LatencySummary s = bench(service, texts, "en", o.threads);
  const Json j{{"n", s.n}, {"threads", o.threads}, {"median_ms", s.median_ms},
               {"p75_ms", s.p75_ms}, {"p95_ms", s.p95_ms}};
  std::cout << j.dump(2) << "\n";
  if (!o.out.empty()) {
    write_output(o.out, j.dump(2) + "\n");
    RunManifest manifest{"bench"};
    manifest.seed = o.seed;
    manifest.inputs = {o.model};
    manifest.outputs = {o.out};
    manifest.write(o.out);
  }
  return kOk;
}

// ---- ingest ----

struct IngestOptions {
  std::string in;
  std::string mapping;
  std::string dataset;
  std::string lang = "en";
  std::string out;
  bool keep_short = false;
};

int run_ingest(const IngestOptions& o) {
  PairFieldMapping mapping;
  if (!o.mapping.empty()) {
    const Json m = Json::parse(io::read_file(o.mapping));
    mapping.wikidata_id = m.value("wikidata_id", mapping.wikidata_id);
    mapping.lang = m.value("lang", mapping.lang);
    mapping.dataset = m.value("dataset", mapping.dataset);
    mapping.easy_title = m.value("title_easy", mapping.easy_title);
    mapping.easy_text = m.value("text_easy", mapping.easy_text);
    mapping.hard_title = m.value("title_hard", mapping.hard_title);
    mapping.hard_text = m.value("text_hard", mapping.hard_text);
  }
  const IngestResult result =
      ingest_published(load_table_rows(o.in), mapping, o.dataset, o.lang, !o.keep_short);
  std::vector<Json> rows;
  for (const auto& p : result.pairs) rows.push_back(pair_to_json(p));
  write_output(o.out, jsonl(rows));
  RunManifest manifest{"ingest"};
  manifest.inputs = {o.in};
  manifest.outputs = {o.out};
  manifest.config = Json{{"dataset", o.dataset}, {"lang", o.lang},
                         {"pairs", result.pairs.size()},
                         {"dropped_too_short", result.dropped_too_short}};
  manifest.write(o.out);
  std::cerr << "ingested " << result.pairs.size() << " pairs, dropped "
            << result.dropped_too_short << " short\n";
  return kOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
    case ErrorCode::kUpstream:
    case ErrorCode::kRateLimited:
      return kUpstreamFailure;
    case ErrorCode::kInvalidRequest:
      return kUsage;
    default:
      return kData;
  }
}

void report_error(std::string_view code, const std::string& message) {
  std::cerr << Json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
}

void remove_partial_outputs() {
  for (const auto& p : g_written) {
    std::error_code ec;
    fs::remove(p, ec);
  }
  g_written.clear();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pairwise readability scoring toolkit"};
  app.set_version_flag("--version", std::string(READRANK_VERSION));
  app.require_subcommand(1);

  ExtractOptions ex;
  auto* extract = app.add_subcommand("extract", "Extract lead-section text from HTML");
  extract->add_option("--in", ex.in, "HTML file or directory")->required();
  extract->add_option("--lang", ex.lang)->required();
  extract->add_option("--source", ex.source);
  extract->add_option("--out", ex.out)->required();
  extract->add_flag("--strict", ex.strict, "Fail on the first unusable document");

  BuildOptions bo;
  auto* build = app.add_subcommand("build-dataset", "Match easy and hard articles into pairs");
  build->add_option("--hard", bo.hard)->required();
  build->add_option("--easy", bo.easy);
  build->add_option("--match", bo.match)
      ->check(CLI::IsMember({"wikidata", "title", "txikipedia"}));
  build->add_option("--dataset", bo.dataset)->required();
  build->add_option("--out", bo.out)->required();
  build->add_option("--skip-report", bo.skip_report);
  build->add_option("--hard-redirects", bo.hard_redirects, "TSV with from/to columns");
  build->add_option("--easy-redirects", bo.easy_redirects, "TSV with from/to columns");

  SplitOptions so;
  auto* split = app.add_subcommand("split", "Split pairs into train and test");
  split->add_option("--pairs", so.pairs)->required();
  split->add_option("--train-frac", so.train_frac);
  split->add_option("--seed", so.seed);
  split->add_option("--train-out", so.train_out);
  split->add_option("--test-out", so.test_out);

  TrainOptions to;
  auto* train_cmd = app.add_subcommand("train", "Train a scorer");
  train_cmd->add_option("--pairs", to.pairs)->required();
  train_cmd->add_option("--mode", to.mode)
      ->check(CLI::IsMember({"document", "sentence", "lfc"}));
  train_cmd->add_option("--margin", to.config.margin);
  train_cmd->add_option("--seed", to.config.seed);
  train_cmd->add_option("--epochs", to.config.epochs);
  train_cmd->add_option("--lr", to.config.learning_rate);
  train_cmd->add_option("--weight-decay", to.config.weight_decay);
  train_cmd->add_option("--hidden", to.config.hidden_units);
  train_cmd->add_option("--batch-size", to.config.batch_size);
  train_cmd->add_option("--val-frac", to.config.val_fraction);
  train_cmd->add_option("--align-threshold", to.config.sentence_threshold);
  train_cmd->add_option("--out", to.out)->required();

  EvalOptions eo;
  auto* eval = app.add_subcommand("eval", "Ranking accuracy with bootstrap CI");
  eval->add_option("--pairs", eo.pairs)->required();
  eval->add_option("--scorer", eo.scorer)
      ->check(CLI::IsMember({"model", "fre", "fkgl", "ns", "lfc"}));
  eval->add_option("--model", eo.model);
  eval->add_option("--bootstrap", eo.bootstrap);
  eval->add_option("--seed", eo.seed);
  eval->add_option("--threads", eo.threads);
  eval->add_option("--out", eo.out)->required();
  eval->add_option("--summary", eo.summary, "Tab-separated summary row");

  ScoreOptions sc;
  auto* score_cmd = app.add_subcommand("score", "Score a text or article");
  score_cmd->add_option("--model", sc.model)->required();
  score_cmd->add_option("--text", sc.text);
  score_cmd->add_option("--file", sc.file, "Plain text, or HTML (lead section is used)");
  score_cmd->add_option("--title", sc.title);
  score_cmd->add_option("--lang", sc.lang);
  score_cmd->add_option("--revision", sc.revision);
  score_cmd->add_option("--side-file", sc.side_file, "ArticleText JSONL to score in batch");
  score_cmd->add_option("--out", sc.out);
  score_cmd->add_option("--config", sc.config, "Service config for title lookups");

  StatsOptions st;
  auto* stats = app.add_subcommand("stats", "Per-language score distributions");
  stats->add_option("--scores", st.scores)->required();
  stats->add_option("--out", st.out)->required();
  stats->add_option("--plot-data", st.plot_data);

  std::vector<std::string> co_datasets;
  std::string co_out;
  auto* cooccur = app.add_subcommand("cooccur", "Count concepts shared across datasets");
  cooccur->add_option("--datasets", co_datasets)->required()->expected(1, -1);
  cooccur->add_option("--out", co_out);

  std::string serve_config;
  std::string serve_model;
  std::optional<int> serve_port;
  std::optional<std::string> serve_host;
  auto* serve = app.add_subcommand("serve", "Run the HTTP scoring service");
  serve->add_option("--config", serve_config);
  serve->add_option("--model", serve_model);
  serve->add_option("--port", serve_port);
  serve->add_option("--host", serve_host);

  BenchOptions bn;
  auto* bench_cmd = app.add_subcommand("bench", "Sequential latency benchmark");
  bench_cmd->add_option("--model", bn.model)->required();
  bench_cmd->add_option("--n", bn.n);
  bench_cmd->add_option("--threads", bn.threads);
  bench_cmd->add_option("--seed", bn.seed);
  bench_cmd->add_option("--texts", bn.texts, "ArticleText JSONL; synthetic texts otherwise");
  bench_cmd->add_option("--out", bn.out);

  IngestOptions in;
  auto* ingest = app.add_subcommand("ingest", "Convert a published pair table");
  ingest->add_option("--in", in.in)->required();
  ingest->add_option("--mapping", in.mapping, "JSON object of column names");
  ingest->add_option("--dataset", in.dataset)->required();
  ingest->add_option("--lang", in.lang);
  ingest->add_option("--out", in.out)->required();
  ingest->add_flag("--keep-short", in.keep_short);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*extract) return run_extract(ex);
    if (*build) return run_build(bo);
    if (*split) return run_split(so);
    if (*train_cmd) return run_train(to);
    if (*eval) return run_eval(eo);
    if (*score_cmd) return run_score(sc);
    if (*stats) return run_stats(st);
    if (*cooccur) return run_cooccur(co_datasets, co_out);
    if (*serve) return run_serve(serve_config, serve_model, serve_port, serve_host);
    if (*bench_cmd) return run_bench(bn);
    if (*ingest) return run_ingest(in);
  } catch (const Error& e) {
    remove_partial_outputs();
    report_error(error_code_name(e.code()), e.what());
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    remove_partial_outputs();
    report_error("Format", e.what());
    return kData;
  } catch (const std::exception& e) {
    remove_partial_outputs();
    report_error("Io", e.what());
    return kData;
  }
  return kUsage;
}
