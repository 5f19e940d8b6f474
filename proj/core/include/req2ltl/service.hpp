#pragma once

// Review sessions over the decompose/validate/translate pipeline, persisted as
// JSON files, and the HTTP/JSON API that serves them.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "req2ltl/decomposer.hpp"
#include "req2ltl/errors.hpp"
#include "req2ltl/llm.hpp"
#include "req2ltl/onion.hpp"
#include "req2ltl/validator.hpp"

namespace req2ltl::service {

enum class SessionStatus { Draft, Approved };
enum class SessionAction { Generated, Edited, Regenerated, Approved };

std::string_view to_string(SessionStatus s) noexcept;
std::string_view to_string(SessionAction a) noexcept;

struct HistoryEntry {
  SessionAction action = SessionAction::Generated;
  std::string timestamp;
  std::optional<std::string> note;
};

struct ReviewSession {
  std::string id;
  std::string requirement;
  ir::OnionPtr tree;
  validation::ValidationReport report;
  std::optional<std::string> ltl;  // present iff report has no Errors
  std::vector<HistoryEntry> history;
  SessionStatus status = SessionStatus::Draft;
  std::vector<std::string> feedback;
};

// Revalidates and retranslates from `tree`.
void refresh(ReviewSession& s);

// {id, requirement, status, tree, diagnostics, mermaid, ltl, history, feedback}
nlohmann::json snapshot(const ReviewSession& s);
// Inverse of snapshot for the persisted fields; derived fields are recomputed.
ReviewSession session_from_json(const nlohmann::json& j);

// Error surfaced to API clients as {code, message, details}.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message, nlohmann::json details = nlohmann::json::object())
      : Error(message), status_(status), code_(std::move(code)), details_(std::move(details)) {}
  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const nlohmann::json& details() const noexcept { return details_; }
  nlohmann::json body() const;

 private:
  int status_;
  std::string code_;
  nlohmann::json details_;
};

// Sessions keyed by id, one JSON file each under `dir`. Mutations of one
// session are serialized; distinct sessions proceed in parallel.
class SessionStore {
 public:
  explicit SessionStore(std::filesystem::path dir);

  nlohmann::json create(ReviewSession s);
  nlohmann::json get(const std::string& id) const;
  // Runs `fn` under the session's lock, refreshes derived fields, persists
  // and returns the new snapshot. Approved sessions reject the call with 409.
  nlohmann::json update(const std::string& id, const std::function<void(ReviewSession&)>& fn);
  std::vector<std::string> ids() const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  struct Entry {
    std::mutex mu;
    ReviewSession session;
  };
  std::shared_ptr<Entry> find(const std::string& id) const;
  void persist(const ReviewSession& s) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
};

struct ServiceConfig {
  std::filesystem::path state_dir = ".req2ltl/sessions";
  decomp::DecompositionConfig decomposition;
};

class ReviewService {
 public:
  ReviewService(llm::LlmBackend& backend, ServiceConfig cfg);

  nlohmann::json create_session(const std::string& requirement);
  nlohmann::json get_session(const std::string& id) const;
  // body: {"path":[..], "op":"Next"} or {"path":[..], "subtree":{..}}
  nlohmann::json patch_tree(const std::string& id, const nlohmann::json& body);
  nlohmann::json regenerate(const std::string& id, const std::string& feedback);
  nlohmann::json approve(const std::string& id);

  SessionStore& store() noexcept { return store_; }

 private:
  ir::OnionPtr generate(const std::string& requirement, const std::vector<std::string>& feedback);

  llm::LlmBackend& backend_;
  ServiceConfig cfg_;
  SessionStore store_;
};

// HTTP front end:
//   POST /sessions {nl}                 -> 201 snapshot
//   GET  /sessions/{id}                 -> snapshot
//   PATCH /sessions/{id}/tree           -> snapshot
//   POST /sessions/{id}/regenerate      -> snapshot
//   POST /sessions/{id}/approve         -> snapshot
//   GET  /healthz                       -> 200
class HttpApi {
 public:
  explicit HttpApi(ReviewService& service);
  ~HttpApi();
  HttpApi(const HttpApi&) = delete;
  HttpApi& operator=(const HttpApi&) = delete;

  // Port 0 picks a free port. Returns the bound port; throws Error on failure.
  int bind(const std::string& host, int port);
  void listen();  // blocks until stop()
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace req2ltl::service
