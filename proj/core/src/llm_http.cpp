#include <httplib.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <semaphore>
#include <thread>

#include "req2ltl/llm.hpp"

namespace req2ltl::llm {

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("endpoint must be an http(s) URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackendConfig HttpBackendConfig::from_env() {
  HttpBackendConfig c;
  c.endpoint = env_or("REQ2LTL_LLM_ENDPOINT", "");
  c.api_key = env_or("REQ2LTL_LLM_API_KEY", "");
  c.model = env_or("REQ2LTL_LLM_MODEL", "gpt-4o");
  if (c.endpoint.empty()) throw std::invalid_argument("REQ2LTL_LLM_ENDPOINT is not set");
  return c;
}

struct HttpBackend::Impl {
  explicit Impl(HttpBackendConfig c)
      : config(std::move(c)), url(split_url(config.endpoint)), slots(std::max(1, config.max_in_flight)) {}

  HttpBackendConfig config;
  SplitUrl url;
  std::counting_semaphore<1024> slots;
};

HttpBackend::HttpBackend(HttpBackendConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
HttpBackend::~HttpBackend() = default;

std::string HttpBackend::name() const { return "http:" + impl_->config.model; }

std::string HttpBackend::complete(const std::string& prompt, const GenerationParams& params) {
  params.check();
  const auto& cfg = impl_->config;
  nlohmann::json body = {
      {"model", params.model_name.empty() ? cfg.model : params.model_name},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"max_tokens", params.max_tokens},
      {"temperature", params.temperature},
  };
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

  impl_->slots.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{impl_->slots};

  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(params.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(params.timeout - secs);
  auto backoff = cfg.initial_backoff;
  BackendError last(BackendError::Kind::Http, 0, "no attempt made");
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client cli(impl_->url.origin);
    cli.set_connection_timeout(secs.count(), usecs.count());
    cli.set_read_timeout(secs.count(), usecs.count());
    cli.set_write_timeout(secs.count(), usecs.count());
    auto res = cli.Post(impl_->url.path, headers, payload, "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                             err == httplib::Error::ConnectionTimeout;
      last = BackendError(timed_out ? BackendError::Kind::Timeout : BackendError::Kind::Http, 0,
                          "transport failure: " + httplib::to_string(err));
      continue;
    }
    if (res->status != 200) {
      last = BackendError(BackendError::Kind::Http, res->status, res->body.substr(0, 200));
      if (transient(res->status)) continue;
      throw last;
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw std::runtime_error("content is not a string");
      return content.get<std::string>();
    } catch (const std::exception& e) {
      throw BackendError(BackendError::Kind::Http, res->status, std::string("malformed completion body: ") + e.what());
    }
  }
  throw last;
}

}  // namespace req2ltl::llm
