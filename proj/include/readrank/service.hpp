#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "readrank/error.hpp"
#include "readrank/evalkit.hpp"
#include "readrank/fetcher.hpp"
#include "readrank/json.hpp"
#include "readrank/ranker.hpp"

namespace httplib {
class Server;
}

namespace readrank {

struct ServiceConfig {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string model_path;
  std::string default_lang = "en";
  FetcherConfig fetcher;
};

// File values first, then READRANK_PORT, READRANK_HOST, READRANK_MODEL,
// READRANK_TIMEOUT_MS, READRANK_RATE_CAP, READRANK_MAX_IN_FLIGHT and
// READRANK_API_URL_<LANG> from the environment.
ServiceConfig load_service_config(const std::string& path);
void apply_env_overrides(ServiceConfig& config,
                         const std::function<const char*(const char*)>& getenv_fn);
Json service_config_to_json(const ServiceConfig& config);

struct ScoreRequest {
  std::optional<std::string> text;
  std::optional<std::string> title;
  std::string lang;
  std::optional<std::int64_t> revision;
};

// Errors: kInvalidRequest unless exactly one of text/title is set.
ScoreRequest parse_score_request(const Json& body, const std::string& default_lang);

struct ScoreResponse {
  double score = 0.0;
  std::size_t n_sentences = 0;
  std::size_t n_chars = 0;
  std::string model_version;
  std::string lang;
  std::optional<std::string> source_title;
  double elapsed_ms = 0.0;
};

Json response_to_json(const ScoreResponse& r);

struct ServiceReply {
  int status = 200;
  Json body;
};

int http_status_for(ErrorCode code);
Json error_body(ErrorCode code, const std::string& message);

// Scores lead sections. Holds no per-request state apart from the fetcher's
// rate limiter.
class ScoreService {
 public:
  ScoreService(std::shared_ptr<const ScorerModel> model,
               std::shared_ptr<ArticleFetcher> fetcher);

  // Errors as in http_status_for.
  ScoreResponse score(const ScoreRequest& request) const;

  ServiceReply handle_score(const Json& body) const;
  ServiceReply handle_score_body(const std::string& raw_body) const;
  ServiceReply handle_health() const;

  const std::string& default_lang() const { return default_lang_; }
  void set_default_lang(std::string lang) { default_lang_ = std::move(lang); }

 private:
  std::shared_ptr<const ScorerModel> model_;
  std::shared_ptr<ArticleFetcher> fetcher_;
  std::chrono::steady_clock::time_point started_;
  std::string default_lang_ = "en";
};

// Registers /v1/health and /v1/score on `server`.
void install_routes(httplib::Server& server, const ScoreService& service);

// Blocks until the server stops.
void run_server(const ScoreService& service, const std::string& host, int port);

// Sends each text as an inline request, one after another per worker, and
// records wall-clock time per response.
LatencySummary bench(const ScoreService& service, const std::vector<std::string>& texts,
                     const std::string& lang, unsigned threads = 1);

}  // namespace readrank
