#include "req2ltl/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "req2ltl/ltl.hpp"
#include "req2ltl/onion_json.hpp"
#include "req2ltl/translator.hpp"

namespace req2ltl::service {

using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return os.str();
}

std::string new_id() {
  static std::mutex mu;
  static std::mt19937_64 rng(std::random_device{}());
  std::lock_guard lock(mu);
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << rng();
  return os.str();
}

bool plausible_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](unsigned char c) { return std::isxdigit(c) != 0; });
}

ServiceError not_found(const std::string& id) {
  return ServiceError(404, "not_found", "no session '" + id + "'", {{"id", id}});
}

template <typename E>
std::optional<E> enum_from(std::string_view name, std::initializer_list<E> all) {
  for (E e : all) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(SessionStatus s) noexcept { return s == SessionStatus::Draft ? "Draft" : "Approved"; }

std::string_view to_string(SessionAction a) noexcept {
  switch (a) {
    case SessionAction::Generated: return "Generated";
    case SessionAction::Edited: return "Edited";
    case SessionAction::Regenerated: return "Regenerated";
    case SessionAction::Approved: return "Approved";
  }
  return "?";
}

void refresh(ReviewSession& s) {
  s.report = validation::validate(s.tree);
  s.ltl.reset();
  if (!s.report.has_errors()) s.ltl = ltl::print_ltl(synth::translate_unchecked(*s.tree));
}

json snapshot(const ReviewSession& s) {
  json diagnostics = json::array();
  for (const auto& d : s.report.diagnostics) diagnostics.push_back(validation::to_json(d));
  json history = json::array();
  for (const auto& h : s.history) {
    json e = {{"action", std::string(to_string(h.action))}, {"timestamp", h.timestamp}};
    if (h.note) e["note"] = *h.note;
    history.push_back(std::move(e));
  }
  return {{"id", s.id},
          {"requirement", s.requirement},
          {"status", std::string(to_string(s.status))},
          {"tree", ir::to_json(s.tree)},
          {"diagnostics", std::move(diagnostics)},
          {"mermaid", ir::render_mermaid(s.tree)},
          {"ltl", s.ltl ? json(*s.ltl) : json(nullptr)},
          {"history", std::move(history)},
          {"feedback", s.feedback}};
}

ReviewSession session_from_json(const json& j) {
  try {
    ReviewSession s;
    s.id = j.at("id").get<std::string>();
    s.requirement = j.at("requirement").get<std::string>();
    s.tree = ir::from_json(j.at("tree"), ir::DecodeMode::Lenient, "/tree");
    auto status = enum_from<SessionStatus>(j.at("status").get<std::string>(),
                                           {SessionStatus::Draft, SessionStatus::Approved});
    if (!status) throw SchemaError("/status", "unknown status");
    s.status = *status;
    for (const auto& h : j.at("history")) {
      auto action = enum_from<SessionAction>(h.at("action").get<std::string>(),
                                             {SessionAction::Generated, SessionAction::Edited,
                                              SessionAction::Regenerated, SessionAction::Approved});
      if (!action) throw SchemaError("/history", "unknown action");
      HistoryEntry e{*action, h.at("timestamp").get<std::string>(), std::nullopt};
      if (h.contains("note")) e.note = h["note"].get<std::string>();
      s.history.push_back(std::move(e));
    }
    if (j.contains("feedback")) s.feedback = j["feedback"].get<std::vector<std::string>>();
    refresh(s);
    return s;
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("malformed session: ") + e.what());
  }
}

json ServiceError::body() const { return {{"code", code_}, {"message", what()}, {"details", details_}}; }

// ---------------------------------------------------------------------------

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  for (const auto& file : std::filesystem::directory_iterator(dir_)) {
    if (file.path().extension() != ".json") continue;
    std::ifstream in(file.path());
    auto entry = std::make_shared<Entry>();
    try {
      entry->session = session_from_json(json::parse(in));
    } catch (const std::exception& e) {
      throw Error("cannot load session file '" + file.path().string() + "': " + e.what());
    }
    sessions_[entry->session.id] = std::move(entry);
  }
}

void SessionStore::persist(const ReviewSession& s) const {
  const auto target = dir_ / (s.id + ".json");
  const auto tmp = dir_ / (s.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << snapshot(s).dump(2) << '\n';
    if (!out) throw Error("cannot write session file '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) const {
  if (!plausible_id(id)) throw not_found(id);
  std::shared_lock lock(map_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw not_found(id);
  return it->second;
}

json SessionStore::create(ReviewSession s) {
  auto entry = std::make_shared<Entry>();
  std::unique_lock lock(map_mu_);
  do {
    s.id = new_id();
  } while (sessions_.count(s.id));
  refresh(s);
  persist(s);
  entry->session = std::move(s);
  sessions_[entry->session.id] = entry;
  return snapshot(entry->session);
}

json SessionStore::get(const std::string& id) const {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  return snapshot(entry->session);
}

json SessionStore::update(const std::string& id, const std::function<void(ReviewSession&)>& fn) {
  auto entry = find(id);
  std::lock_guard lock(entry->mu);
  if (entry->session.status == SessionStatus::Approved) {
    throw ServiceError(409, "session_approved", "session '" + id + "' is approved and can no longer change",
                       {{"id", id}});
  }
  ReviewSession next = entry->session;
  fn(next);
  refresh(next);
  persist(next);
  entry->session = std::move(next);
  return snapshot(entry->session);
}

std::vector<std::string> SessionStore::ids() const {
  std::shared_lock lock(map_mu_);
  std::vector<std::string> out;
  for (const auto& [id, entry] : sessions_) out.push_back(id);
  return out;
}

// ---------------------------------------------------------------------------

ReviewService::ReviewService(llm::LlmBackend& backend, ServiceConfig cfg)
    : backend_(backend), cfg_(std::move(cfg)), store_(cfg_.state_dir) {
  cfg_.decomposition.check();
}

ir::OnionPtr ReviewService::generate(const std::string& requirement, const std::vector<std::string>& feedback) {
  auto cfg = cfg_.decomposition;
  std::string joined;
  for (const auto& f : feedback) joined += (joined.empty() ? "" : "\n") + f;
  if (!joined.empty()) cfg.feedback = joined;
  try {
    return decomp::decompose(requirement, cfg, backend_).tree;
  } catch (const decomp::RepairExhausted& e) {
    // The reviewer gets the last tree; its diagnostics come from refresh().
    return e.last_tree();
  } catch (const llm::BackendError& e) {
    throw ServiceError(502, "backend_failure", e.what());
  } catch (const ProtocolError& e) {
    throw ServiceError(502, "protocol_error", e.what());
  } catch (const DepthExceeded& e) {
    throw ServiceError(422, "depth_exceeded", e.what());
  }
}

json ReviewService::create_session(const std::string& requirement) {
  if (requirement.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ServiceError(400, "invalid_request", "requirement text is empty");
  }
  ReviewSession s;
  s.requirement = requirement;
  s.tree = generate(requirement, {});
  s.history.push_back({SessionAction::Generated, utc_now(), std::nullopt});
  return store_.create(std::move(s));
}

json ReviewService::get_session(const std::string& id) const { return store_.get(id); }

json ReviewService::patch_tree(const std::string& id, const json& body) {
  if (!body.is_object()) throw ServiceError(400, "invalid_request", "body must be a JSON object");
  if (!body.contains("path")) throw ServiceError(400, "invalid_request", "missing 'path'");
  const bool has_op = body.contains("op");
  const bool has_subtree = body.contains("subtree");
  if (has_op == has_subtree) throw ServiceError(400, "invalid_request", "exactly one of 'op' and 'subtree' is required");

  ir::NodePath path;
  ir::Replacement replacement;
  std::string note;
  try {
    path = ir::path_from_json(body["path"], "/path");
    if (has_op) {
      if (!body["op"].is_string()) throw SchemaError("/op", "expected a string");
      const auto name = body["op"].get<std::string>();
      if (auto s = ir::parse_scope_op(name)) {
        replacement = *s;
      } else if (auto r = ir::parse_relation_op(name)) {
        replacement = *r;
      } else {
        throw ServiceError(422, "unknown_operator", "unknown operator '" + name + "'", {{"op", name}});
      }
      note = ir::to_string(path) + " op " + name;
    } else {
      replacement = ir::from_json(body["subtree"], ir::DecodeMode::Lenient, "/subtree");
      note = ir::to_string(path) + " subtree";
    }
  } catch (const SchemaError& e) {
    throw ServiceError(400, "invalid_request", e.what(), {{"pointer", e.pointer()}});
  }

  return store_.update(id, [&](ReviewSession& s) {
    try {
      s.tree = ir::edit_node(s.tree, path, replacement);
    } catch (const PathError& e) {
      throw ServiceError(422, "path_error", e.what(), {{"path", ir::to_json(path)}});
    } catch (const KindMismatch& e) {
      throw ServiceError(422, "kind_mismatch", e.what(), {{"path", ir::to_json(path)}});
    }
    s.history.push_back({SessionAction::Edited, utc_now(), note});
  });
}

json ReviewService::regenerate(const std::string& id, const std::string& feedback) {
  return store_.update(id, [&](ReviewSession& s) {
    if (!feedback.empty()) s.feedback.push_back(feedback);
    s.tree = generate(s.requirement, s.feedback);
    s.history.push_back(
        {SessionAction::Regenerated, utc_now(), feedback.empty() ? std::nullopt : std::optional(feedback)});
  });
}

json ReviewService::approve(const std::string& id) {
  return store_.update(id, [&](ReviewSession& s) {
    if (s.report.has_errors()) {
      throw ServiceError(409, "has_errors", "session '" + id + "' still has Error diagnostics",
                         {{"errors", s.report.error_count()}});
    }
    s.status = SessionStatus::Approved;
    s.history.push_back({SessionAction::Approved, utc_now(), std::nullopt});
  });
}

}  // namespace req2ltl::service
