#pragma once

// Chat-completion backends: a live OpenAI-compatible HTTP client and a
// scripted stub that replays recorded transcripts.

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "req2ltl/errors.hpp"

namespace req2ltl::llm {

struct GenerationParams {
  std::string model_name;
  int max_tokens = 1024;
  double temperature = 0.0;
  std::chrono::milliseconds timeout{60000};

  // Throws std::invalid_argument unless max_tokens > 0 and timeout > 0.
  void check() const;
};

class BackendError : public Error {
 public:
  enum class Kind { Timeout, Http, Exhausted };

  BackendError(Kind kind, int status, const std::string& detail);

  Kind kind() const noexcept { return kind_; }
  // HTTP status for Kind::Http; 0 when the transport failed before a response.
  int status() const noexcept { return status_; }

 private:
  Kind kind_;
  int status_;
};

std::string_view to_string(BackendError::Kind k) noexcept;

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual std::string complete(const std::string& prompt, const GenerationParams& params) = 0;
  virtual std::string name() const = 0;
};

// "sha256:" followed by the lowercase hex digest of `text`.
std::string prompt_digest(std::string_view text);

struct TranscriptEntry {
  // Substring of the prompt, or "sha256:<hex>" for an exact prompt digest.
  std::string matcher;
  std::string response;

  bool matches(const std::string& prompt, const std::string& digest) const;
};

struct ScriptedTranscript {
  std::vector<TranscriptEntry> entries;
  bool strict_order = true;

  // JSONL: one {"match": S, "response": S | object} per line. An optional
  // first line {"strictOrder": bool} sets the mode. Object responses are
  // re-serialized compactly. Throws SchemaError with the line number.
  static ScriptedTranscript parse(std::string_view jsonl);
  static ScriptedTranscript load(const std::string& path);
};

// Replays a transcript. In strict order each call must match the next entry;
// otherwise the earliest unconsumed matching entry answers. A call with no
// answer raises BackendError(Exhausted). Thread-safe.
class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(ScriptedTranscript transcript);

  std::string complete(const std::string& prompt, const GenerationParams& params) override;
  std::string name() const override { return "scripted"; }

  std::size_t calls() const;
  std::size_t remaining() const;

 private:
  mutable std::mutex mu_;
  ScriptedTranscript transcript_;
  std::vector<bool> used_;
  std::size_t cursor_ = 0;
  std::size_t calls_ = 0;
};

struct HttpBackendConfig {
  std::string endpoint;  // full chat-completions URL
  std::string api_key;
  std::string model;
  int max_in_flight = 4;
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{250};

  // Reads REQ2LTL_LLM_ENDPOINT, REQ2LTL_LLM_API_KEY and REQ2LTL_LLM_MODEL.
  // Throws std::invalid_argument when the endpoint is unset.
  static HttpBackendConfig from_env();
};

// OpenAI-compatible POST {model, messages, max_tokens, temperature}. Transport
// failures, 429 and 5xx are retried with exponential backoff; other statuses
// fail immediately. At most `max_in_flight` requests run at once.
class HttpBackend : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  ~HttpBackend() override;

  std::string complete(const std::string& prompt, const GenerationParams& params) override;
  std::string name() const override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace req2ltl::llm
