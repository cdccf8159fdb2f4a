#include "readrank/service.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "readrank/error.hpp"
#include "readrank/io.hpp"

namespace readrank {
namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

std::optional<std::string> optional_string(const Json& body, const char* key) {
  if (!body.contains(key) || body[key].is_null()) return std::nullopt;
  if (!body[key].is_string()) {
    throw Error(ErrorCode::kInvalidRequest, std::string(key) + " must be a string");
  }
  return body[key].get<std::string>();
}

void write_reply(httplib::Response& res, const ServiceReply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(), "application/json; charset=utf-8");
}

}  // namespace

ServiceConfig load_service_config(const std::string& path) {
  ServiceConfig config;
  if (!path.empty()) {
    Json j;
    try {
      j = Json::parse(io::read_file(path));
    } catch (const Json::parse_error& e) {
      throw Error(ErrorCode::kFormat, "bad service config " + path + ": " + e.what());
    }
    config.host = j.value("host", config.host);
    config.port = j.value("port", config.port);
    config.model_path = j.value("model_path", config.model_path);
    config.default_lang = j.value("default_lang", config.default_lang);
    if (j.contains("fetcher")) merge_fetcher_config(j["fetcher"], config.fetcher);
  }
  apply_env_overrides(config, [](const char* name) { return std::getenv(name); });
  return config;
}

void apply_env_overrides(ServiceConfig& config,
                         const std::function<const char*(const char*)>& getenv_fn) {
  const auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = getenv_fn(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  try {
    if (auto v = get("READRANK_HOST")) config.host = *v;
    if (auto v = get("READRANK_PORT")) config.port = std::stoi(*v);
    if (auto v = get("READRANK_MODEL")) config.model_path = *v;
    if (auto v = get("READRANK_TIMEOUT_MS")) {
      config.fetcher.timeout = std::chrono::milliseconds(std::stoll(*v));
    }
    if (auto v = get("READRANK_RATE_CAP")) config.fetcher.max_requests_per_second = std::stod(*v);
    if (auto v = get("READRANK_MAX_IN_FLIGHT")) config.fetcher.max_in_flight = std::stoul(*v);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kFormat, "invalid numeric value in READRANK_* environment");
  }
  for (const char* lang : {"en", "de", "fr", "es", "it", "nl", "pt", "ru", "eu", "ca", "el",
                           "hy", "simple"}) {
    std::string name = "READRANK_API_URL_";
    for (const char* p = lang; *p; ++p) name += static_cast<char>(std::toupper(*p));
    if (auto v = get(name.c_str())) config.fetcher.api_urls[lang] = *v;
  }
}

Json service_config_to_json(const ServiceConfig& config) {
  return Json{{"host", config.host},
              {"port", config.port},
              {"model_path", config.model_path},
              {"default_lang", config.default_lang},
              {"fetcher", Json(config.fetcher)}};
}

ScoreRequest parse_score_request(const Json& body, const std::string& default_lang) {
  if (!body.is_object()) throw Error(ErrorCode::kInvalidRequest, "request body must be an object");
  ScoreRequest r;
  r.text = optional_string(body, "text");
  r.title = optional_string(body, "title");
  if (r.text.has_value() == r.title.has_value()) {
    throw Error(ErrorCode::kInvalidRequest, "exactly one of text or title is required");
  }
  const auto lang = optional_string(body, "lang");
  if (r.title && !lang) throw Error(ErrorCode::kInvalidRequest, "title requests need lang");
  r.lang = lang.value_or(default_lang);
  if (body.contains("revision") && !body["revision"].is_null()) {
    if (!body["revision"].is_number_integer()) {
      throw Error(ErrorCode::kInvalidRequest, "revision must be an integer");
    }
    if (r.text) throw Error(ErrorCode::kInvalidRequest, "revision only applies to title requests");
    r.revision = body["revision"].get<std::int64_t>();
  }
  return r;
}

Json response_to_json(const ScoreResponse& r) {
  return Json{{"score", r.score},
              {"n_sentences", r.n_sentences},
              {"n_chars", r.n_chars},
              {"model_version", r.model_version},
              {"lang", r.lang},
              {"source_title", r.source_title ? Json(*r.source_title) : Json(nullptr)},
              {"elapsed_ms", r.elapsed_ms}};
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidRequest:
    case ErrorCode::kFormat:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kEmptyLead:
    case ErrorCode::kEmptyText:
      return 422;
    case ErrorCode::kRateLimited:
      return 429;
    case ErrorCode::kUpstream:
    case ErrorCode::kMalformedInput:
      return 502;
    case ErrorCode::kModelNotLoaded:
      return 503;
    default:
      return 500;
  }
}

Json error_body(ErrorCode code, const std::string& message) {
  return Json{{"code", std::string(error_code_name(code))}, {"message", message}};
}

ScoreService::ScoreService(std::shared_ptr<const ScorerModel> model,
                           std::shared_ptr<ArticleFetcher> fetcher)
    : model_(std::move(model)),
      fetcher_(std::move(fetcher)),
      started_(std::chrono::steady_clock::now()) {}

ScoreResponse ScoreService::score(const ScoreRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  if (!model_) throw Error(ErrorCode::kModelNotLoaded, "no model loaded");

  ScoreResponse out;
  out.lang = request.lang;
  ArticleText article;
  if (request.text) {
    article = make_article_text("", request.lang, Source::kOther, *request.text);
  } else {
    if (!fetcher_) throw Error(ErrorCode::kUpstream, "no article fetcher configured");
    const FetchedArticle fetched = fetcher_->fetch(request.lang, *request.title, request.revision);
    out.source_title = fetched.source_title;
    article = extract_lead_text(fetched.document);
  }
  out.score = readrank::score(*model_, article);
  out.n_sentences = article.num_sentences;
  out.n_chars = article.num_chars;
  out.model_version = model_->version;
  out.elapsed_ms = ms_since(start);
  return out;
}

ServiceReply ScoreService::handle_score(const Json& body) const {
  try {
    return {200, response_to_json(score(parse_score_request(body, default_lang_)))};
  } catch (const Error& e) {
    return {http_status_for(e.code()), error_body(e.code(), e.what())};
  } catch (const Json::exception& e) {
    return {400, error_body(ErrorCode::kInvalidRequest, e.what())};
  }
}

ServiceReply ScoreService::handle_score_body(const std::string& raw_body) const {
  Json body;
  try {
    body = Json::parse(raw_body);
  } catch (const Json::parse_error& e) {
    return {400, error_body(ErrorCode::kInvalidRequest, std::string("invalid JSON: ") + e.what())};
  }
  return handle_score(body);
}

ServiceReply ScoreService::handle_health() const {
  if (!model_) {
    return {503, error_body(ErrorCode::kModelNotLoaded, "no model loaded")};
  }
  return {200, Json{{"status", "ok"},
                    {"model_version", model_->version},
                    {"uptime_s", ms_since(started_) / 1000.0}}};
}

void install_routes(httplib::Server& server, const ScoreService& service) {
  server.Get("/v1/health", [&service](const httplib::Request&, httplib::Response& res) {
    write_reply(res, service.handle_health());
  });
  server.Post("/v1/score", [&service](const httplib::Request& req, httplib::Response& res) {
    write_reply(res, service.handle_score_body(req.body));
  });
  server.Get("/v1/score", [&service](const httplib::Request& req, httplib::Response& res) {
    Json body = Json::object();
    for (const char* key : {"lang", "title", "text"}) {
      if (req.has_param(key)) body[key] = req.get_param_value(key);
    }
    if (req.has_param("revision")) {
      try {
        body["revision"] = std::stoll(req.get_param_value("revision"));
      } catch (const std::exception&) {
        write_reply(res, {400, error_body(ErrorCode::kInvalidRequest, "revision must be an integer")});
        return;
      }
    }
    write_reply(res, service.handle_score(body));
  });
}

void run_server(const ScoreService& service, const std::string& host, int port) {
  httplib::Server server;
  install_routes(server, service);
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::kIo, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

LatencySummary bench(const ScoreService& service, const std::vector<std::string>& texts,
                     const std::string& lang, unsigned threads) {
  std::vector<double> samples(texts.size());
  const auto run = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < texts.size(); i += step) {
      const auto start = std::chrono::steady_clock::now();
      const ServiceReply reply = service.handle_score(Json{{"text", texts[i]}, {"lang", lang}});
      samples[i] = ms_since(start);
      if (reply.status != 200) {
        throw Error(ErrorCode::kDegenerateData,
                    "bench request " + std::to_string(i) + " failed: " + reply.body.dump());
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    run(0, 1);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            run(t, threads);
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  return latency_summary(samples);
}

}  // namespace readrank
