#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>

#include "readrank/json.hpp"
#include "readrank/textkit.hpp"

namespace readrank {

struct HttpResponse {
  int status = 0;  // 0: transport failure or timeout
  std::string body;
  std::string error;
};

// Blocking GET. Implementations must be callable from several threads.
class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse get(const std::string& url, std::chrono::milliseconds timeout,
                           const std::string& user_agent) = 0;
};

// cpp-httplib backed client; follows HTTP redirects.
std::shared_ptr<HttpClient> make_default_http_client();

struct FetcherConfig {
  // lang -> action API endpoint. Missing languages use `default_api_url`
  // with "{lang}" substituted.
  std::map<std::string, std::string> api_urls;
  std::string default_api_url = "https://{lang}.wikipedia.org/w/api.php";
  std::chrono::milliseconds timeout{10000};
  int retries = 2;
  std::chrono::milliseconds backoff{250};
  double max_requests_per_second = 10.0;  // per host; <= 0 disables
  std::size_t max_in_flight = 8;
  std::string user_agent = "readrank/" READRANK_VERSION " (readability scoring; batch client)";

  std::string api_url(const std::string& lang) const;
};

void to_json(Json& j, const FetcherConfig& c);
// Merges the keys present in `j` over `c`.
void merge_fetcher_config(const Json& j, FetcherConfig& c);

struct FetchedArticle {
  RawDocument document;      // title is the resolved (final) title
  std::string source_title;  // title as requested
  std::optional<std::int64_t> revision;
};

// Sliding one-second window per host.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second) : per_second_(per_second) {}
  bool try_acquire(const std::string& host);

 private:
  double per_second_;
  std::mutex mutex_;
  std::map<std::string, std::deque<std::chrono::steady_clock::time_point>> windows_;
};

class ArticleFetcher {
 public:
  ArticleFetcher(FetcherConfig config, std::shared_ptr<HttpClient> client);

  // Rendered HTML of `title` via action=parse, following wiki redirects.
  // Errors: kNotFound, kUpstream, kRateLimited, kInvalidRequest.
  FetchedArticle fetch(const std::string& lang, const std::string& title,
                       std::optional<std::int64_t> revision = std::nullopt);

  const FetcherConfig& config() const { return config_; }

 private:
  FetcherConfig config_;
  std::shared_ptr<HttpClient> client_;
  RateLimiter limiter_;
  std::counting_semaphore<1024> in_flight_;
};

std::string url_encode(std::string_view s);
std::string url_host(std::string_view url);
std::string parse_request_url(const std::string& api_url, const std::string& title,
                              std::optional<std::int64_t> revision);

}  // namespace readrank
