#include "readrank/fetcher.hpp"

#include <algorithm>
#include <random>
#include <thread>

#include <httplib.h>

#include "readrank/error.hpp"

namespace readrank {
namespace {

class HttplibClient : public HttpClient {
 public:
  HttpResponse get(const std::string& url, std::chrono::milliseconds timeout,
                   const std::string& user_agent) override {
    const auto scheme_end = url.find("://");
    const auto path_start =
        url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    httplib::Client client(origin);
    client.set_follow_location(true);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Get(path, httplib::Headers{{"User-Agent", user_agent}});
    HttpResponse out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

std::chrono::milliseconds jittered(std::chrono::milliseconds base, int attempt) {
  thread_local std::minstd_rand jitter{std::random_device{}()};
  const auto scaled = base.count() * (1LL << attempt);
  std::uniform_int_distribution<long long> dist(scaled / 2, scaled);
  return std::chrono::milliseconds(scaled > 0 ? dist(jitter) : 0);
}

}  // namespace

std::shared_ptr<HttpClient> make_default_http_client() {
  return std::make_shared<HttplibClient>();
}

std::string FetcherConfig::api_url(const std::string& lang) const {
  if (auto it = api_urls.find(lang); it != api_urls.end()) return it->second;
  std::string url = default_api_url;
  if (auto pos = url.find("{lang}"); pos != std::string::npos) url.replace(pos, 6, lang);
  return url;
}

void to_json(Json& j, const FetcherConfig& c) {
  j = Json{{"api_urls", c.api_urls},
           {"default_api_url", c.default_api_url},
           {"timeout_ms", c.timeout.count()},
           {"retries", c.retries},
           {"backoff_ms", c.backoff.count()},
           {"max_requests_per_second", c.max_requests_per_second},
           {"max_in_flight", c.max_in_flight},
           {"user_agent", c.user_agent}};
}

void merge_fetcher_config(const Json& j, FetcherConfig& c) {
  if (j.contains("api_urls")) {
    for (const auto& [lang, url] : j.at("api_urls").items()) {
      c.api_urls[lang] = url.get<std::string>();
    }
  }
  if (j.contains("default_api_url")) c.default_api_url = j.at("default_api_url");
  if (j.contains("timeout_ms")) c.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long long>());
  if (j.contains("retries")) c.retries = j.at("retries");
  if (j.contains("backoff_ms")) c.backoff = std::chrono::milliseconds(j.at("backoff_ms").get<long long>());
  if (j.contains("max_requests_per_second")) c.max_requests_per_second = j.at("max_requests_per_second");
  if (j.contains("max_in_flight")) c.max_in_flight = j.at("max_in_flight");
  if (j.contains("user_agent")) c.user_agent = j.at("user_agent");
  c.max_in_flight = std::clamp<std::size_t>(c.max_in_flight, 1, 1024);
}

bool RateLimiter::try_acquire(const std::string& host) {
  if (per_second_ <= 0.0) return true;
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard lock(mutex_);
  auto& window = windows_[host];
  while (!window.empty() && now - window.front() >= std::chrono::seconds(1)) {
    window.pop_front();
  }
  if (static_cast<double>(window.size()) >= per_second_) return false;
  window.push_back(now);
  return true;
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string url_host(std::string_view url) {
  auto start = url.find("://");
  start = start == std::string_view::npos ? 0 : start + 3;
  const auto end = url.find_first_of("/?", start);
  return std::string(url.substr(start, end == std::string_view::npos ? url.size() - start
                                                                     : end - start));
}

std::string parse_request_url(const std::string& api_url, const std::string& title,
                              std::optional<std::int64_t> revision) {
  std::string url = api_url;
  url += api_url.find('?') == std::string::npos ? '?' : '&';
  url += "action=parse&redirects=1&prop=text&format=json&formatversion=2";
  if (revision) {
    url += "&oldid=" + std::to_string(*revision);
  } else {
    url += "&page=" + url_encode(title);
  }
  return url;
}

ArticleFetcher::ArticleFetcher(FetcherConfig config, std::shared_ptr<HttpClient> client)
    : config_(std::move(config)),
      client_(std::move(client)),
      limiter_(config_.max_requests_per_second),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 1024))) {}

FetchedArticle ArticleFetcher::fetch(const std::string& lang, const std::string& title,
                                     std::optional<std::int64_t> revision) {
  if (lang.empty() || (title.empty() && !revision)) {
    throw Error(ErrorCode::kInvalidRequest, "lang and title are required");
  }
  const std::string url = parse_request_url(config_.api_url(lang), title, revision);
  const std::string host = url_host(url);

  HttpResponse res;
  for (int attempt = 0;; ++attempt) {
    if (!limiter_.try_acquire(host)) {
      throw Error(ErrorCode::kRateLimited, "request rate cap reached for " + host);
    }
    in_flight_.acquire();
    try {
      res = client_->get(url, config_.timeout, config_.user_agent);
    } catch (...) {
      in_flight_.release();
      throw;
    }
    in_flight_.release();
    const bool transient = res.status == 0 || res.status >= 500;
    if (!transient || attempt >= config_.retries) break;
    std::this_thread::sleep_for(jittered(config_.backoff, attempt));
  }

  if (res.status == 404) throw Error(ErrorCode::kNotFound, "article not found: " + title);
  if (res.status == 429) throw Error(ErrorCode::kRateLimited, "upstream rate limit for " + host);
  if (res.status == 0) throw Error(ErrorCode::kUpstream, "upstream request failed: " + res.error);
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::kUpstream, "upstream returned HTTP " + std::to_string(res.status));
  }

  Json body;
  try {
    body = Json::parse(res.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kUpstream, std::string("upstream sent invalid JSON: ") + e.what());
  }
  if (body.contains("error")) {
    const std::string code = body["error"].value("code", "");
    if (code == "missingtitle" || code == "nosuchrevid" || code == "invalidtitle") {
      throw Error(ErrorCode::kNotFound, "article not found: " + title);
    }
    throw Error(ErrorCode::kUpstream, "upstream error: " + code);
  }
  const auto& parse = body.at("parse");
  if (!parse.contains("text") || !parse["text"].is_string()) {
    throw Error(ErrorCode::kUpstream, "upstream response has no text");
  }

  FetchedArticle out;
  out.source_title = title;
  out.document.html = parse["text"].get<std::string>();
  out.document.title = parse.value("title", title);
  out.document.lang = lang;
  out.document.source = Source::kWikipedia;
  if (parse.contains("revid") && parse["revid"].is_number_integer()) {
    out.revision = parse["revid"].get<std::int64_t>();
  }
  return out;
}

}  // namespace readrank
