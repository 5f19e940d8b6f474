#include "req2ltl/llm.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace req2ltl::llm {

void GenerationParams::check() const {
  if (max_tokens <= 0) throw std::invalid_argument("max_tokens must be positive");
  if (timeout.count() <= 0) throw std::invalid_argument("timeout must be positive");
}

std::string_view to_string(BackendError::Kind k) noexcept {
  switch (k) {
    case BackendError::Kind::Timeout: return "Timeout";
    case BackendError::Kind::Http: return "Http";
    case BackendError::Kind::Exhausted: return "Exhausted";
  }
  return "";
}

BackendError::BackendError(Kind kind, int status, const std::string& detail)
    : Error("backend error (" + std::string(to_string(kind)) +
            (kind == Kind::Http ? " " + std::to_string(status) : std::string()) + "): " + detail),
      kind_(kind),
      status_(status) {}

std::string prompt_digest(std::string_view text) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out = "sha256:";
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

bool TranscriptEntry::matches(const std::string& prompt, const std::string& digest) const {
  if (matcher.rfind("sha256:", 0) == 0) return matcher == digest;
  return prompt.find(matcher) != std::string::npos;
}

ScriptedTranscript ScriptedTranscript::parse(std::string_view jsonl) {
  ScriptedTranscript t;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(where, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError(where, "expected an object");
    if (first && j.contains("strictOrder")) {
      if (!j["strictOrder"].is_boolean()) throw SchemaError(where + "/strictOrder", "expected a boolean");
      t.strict_order = j["strictOrder"].get<bool>();
      first = false;
      continue;
    }
    first = false;
    if (!j.contains("match") || !j["match"].is_string()) throw SchemaError(where + "/match", "expected a string");
    if (!j.contains("response")) throw SchemaError(where + "/response", "required field missing");
    const auto& r = j["response"];
    t.entries.push_back({j["match"].get<std::string>(), r.is_string() ? r.get<std::string>() : r.dump()});
  }
  return t;
}

ScriptedTranscript ScriptedTranscript::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open transcript '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

ScriptedBackend::ScriptedBackend(ScriptedTranscript transcript)
    : transcript_(std::move(transcript)), used_(transcript_.entries.size(), false) {}

std::string ScriptedBackend::complete(const std::string& prompt, const GenerationParams& params) {
  params.check();
  const std::string digest = prompt_digest(prompt);
  std::lock_guard lock(mu_);
  ++calls_;
  const auto& entries = transcript_.entries;
  if (transcript_.strict_order) {
    if (cursor_ >= entries.size()) {
      throw BackendError(BackendError::Kind::Exhausted, 0, "transcript has no entries left");
    }
    if (!entries[cursor_].matches(prompt, digest)) {
      throw BackendError(BackendError::Kind::Exhausted, 0,
                         "call " + std::to_string(calls_) + " does not match entry " + std::to_string(cursor_ + 1) +
                             " ('" + entries[cursor_].matcher + "')");
    }
    used_[cursor_] = true;
    return entries[cursor_++].response;
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!used_[i] && entries[i].matches(prompt, digest)) {
      used_[i] = true;
      return entries[i].response;
    }
  }
  throw BackendError(BackendError::Kind::Exhausted, 0, "no unused transcript entry matches call " +
                                                           std::to_string(calls_));
}

std::size_t ScriptedBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

std::size_t ScriptedBackend::remaining() const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count(used_.begin(), used_.end(), false));
}

}  // namespace req2ltl::llm
