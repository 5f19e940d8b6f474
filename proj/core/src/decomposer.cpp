#include "req2ltl/decomposer.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <regex>
#include <sstream>

#include "req2ltl/ltl.hpp"
#include "req2ltl/onion_json.hpp"
#include "resources.hpp"

namespace req2ltl::decomp {

using ir::AtomicProposition;
using ir::NodeKind;
using ir::OnionNode;
using ir::OnionPtr;
using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

const std::regex& placeholder_token() {
  static const std::regex re(R"(\bProp[0-9]+\b)");
  return re;
}

// Pulls the first JSON object out of a model reply, tolerating code fences
// and prose around it.
std::optional<json> extract_json(const std::string& raw) {
  std::string body = raw;
  if (auto fence = body.find("```"); fence != std::string::npos) {
    auto start = body.find('\n', fence);
    auto end = start == std::string::npos ? std::string::npos : body.find("```", start);
    if (end != std::string::npos) body = body.substr(start + 1, end - start - 1);
  }
  const auto first = body.find('{');
  const auto last = body.rfind('}');
  if (first == std::string::npos || last == std::string::npos || last < first) return std::nullopt;
  try {
    auto j = json::parse(body.substr(first, last - first + 1));
    if (!j.is_object()) return std::nullopt;
    return j;
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

std::optional<std::string> need_bool(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_boolean()) return std::string("'") + key + "' must be a boolean";
  return std::nullopt;
}

std::optional<std::string> need_text(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string() || trim(j[key].get<std::string>()).empty()) {
    return std::string("'") + key + "' must be a non-empty string";
  }
  return std::nullopt;
}

// Condition of a mode scope: an AP object, or a bare identifier.
std::optional<AtomicProposition> condition_of(const json& c) {
  if (c.is_string()) {
    const std::string name = trim(c.get<std::string>());
    if (!ltl::is_identifier(name)) return std::nullopt;
    AtomicProposition ap;
    ap.var = name;
    return ap;
  }
  try {
    auto ap = ir::ap_from_json(c, ir::DecodeMode::Lenient);
    if (trim(ap.var).empty()) return std::nullopt;
    return ap;
  } catch (const SchemaError&) {
    return std::nullopt;
  }
}

std::optional<std::string> ap_contract(const json& j) {
  try {
    auto ap = ir::ap_from_json(j, ir::DecodeMode::Lenient);
    if (trim(ap.var).empty()) return "'var' must be a non-empty string";
  } catch (const SchemaError& e) {
    return e.what();
  }
  return std::nullopt;
}

AtomicProposition lifted_ap(const std::string& token) {
  AtomicProposition ap;
  ap.var = token;
  return ap;
}

std::string render_slots(const std::string& tmpl, const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string::npos) {
        auto it = slots.find(tmpl.substr(i + 1, close - i - 1));
        if (it != slots.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::string render_few_shot(const std::string& jsonl) {
  std::ostringstream out;
  std::istringstream in(jsonl);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto j = json::parse(line);
    out << "Requirement: " << j.at("requirement").get<std::string>() << "\n"
        << "OnionL: " << j.at("onionl").dump() << "\n"
        << "LTL: " << j.at("ltl").get<std::string>() << "\n\n";
  }
  return out.str();
}

}  // namespace

void DecompositionConfig::check() const {
  if (max_repair_rounds < 0) throw std::invalid_argument("maxRepairRounds must be >= 0");
  if (depth_budget < 1) throw std::invalid_argument("depthBudget must be >= 1");
  params.check();
}

DecompositionConfig config_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("", "configuration must be a JSON object");
  DecompositionConfig c;
  auto get = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      field = j[key].get<std::decay_t<decltype(field)>>();
    } catch (const json::exception&) {
      throw SchemaError(std::string("/") + key, "wrong value type");
    }
  };
  get("maxRepairRounds", c.max_repair_rounds);
  get("fewShotSetId", c.few_shot_set_id);
  get("liftedMode", c.lifted_mode);
  get("promptTemplateVersion", c.prompt_template_version);
  get("depthBudget", c.depth_budget);
  get("model", c.params.model_name);
  get("maxTokens", c.params.max_tokens);
  get("temperature", c.params.temperature);
  if (j.contains("timeoutMs")) {
    long long ms = 0;
    get("timeoutMs", ms);
    c.params.timeout = std::chrono::milliseconds(ms);
  }
  c.check();
  return c;
}

std::string_view to_string(StepId s) noexcept {
  switch (s) {
    case StepId::ExtractScope: return "ExtractScope";
    case StepId::TopLevel: return "TopLevel";
    case StepId::UnaryExtract: return "UnaryExtract";
    case StepId::BinarySplit: return "BinarySplit";
    case StepId::AtomicityCheck: return "AtomicityCheck";
    case StepId::NormalizeAP: return "NormalizeAP";
    case StepId::Refine: return "Refine";
    case StepId::Repair: return "Repair";
  }
  return "";
}

std::optional<StepId> parse_step_id(std::string_view s) {
  for (auto id : {StepId::ExtractScope, StepId::TopLevel, StepId::UnaryExtract, StepId::BinarySplit,
                  StepId::AtomicityCheck, StepId::NormalizeAP, StepId::Refine, StepId::Repair}) {
    if (to_string(id) == s) return id;
  }
  return std::nullopt;
}

std::string StepTrace::to_jsonl() const {
  std::string out;
  for (const auto& r : steps) {
    json j = {{"step", std::string(to_string(r.step))},
              {"round", r.round},
              {"clause", r.clause},
              {"promptDigest", r.prompt_digest},
              {"rawResponse", r.raw_response},
              {"parsedResult", r.parsed_result}};
    out += j.dump();
    out += '\n';
  }
  return out;
}

StepTrace StepTrace::from_jsonl(std::string_view text) {
  StepTrace t;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    try {
      auto j = json::parse(line);
      StepRecord r;
      auto id = parse_step_id(j.at("step").get<std::string>());
      if (!id) throw SchemaError(where + "/step", "unknown step");
      r.step = *id;
      r.round = j.at("round").get<int>();
      r.clause = j.at("clause").get<std::string>();
      r.prompt_digest = j.at("promptDigest").get<std::string>();
      r.raw_response = j.at("rawResponse").get<std::string>();
      r.parsed_result = j.at("parsedResult").get<std::string>();
      t.steps.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw SchemaError(where, e.what());
    }
  }
  return t;
}

bool trace_order_legal(const StepTrace& trace, int max_rounds) {
  const auto& s = trace.steps;
  if (s.empty()) return false;
  int round = 0;
  bool top_level_seen = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto& r = s[i];
    if (r.round < round || r.round > max_rounds || r.round < 0) return false;
    if (r.round > round) {
      // A repair round opens with its repair prompt.
      if (r.step != StepId::Repair) return false;
      round = r.round;
    }
    if (round > 0 && r.step != StepId::Repair) return false;
    if (r.step == StepId::Repair && round == 0) return false;
    if (round > 0) continue;

    if (r.step == StepId::ExtractScope) {
      if (top_level_seen) return false;
      continue;
    }
    if (r.step == StepId::TopLevel) {
      if (top_level_seen || i == 0) return false;
      top_level_seen = true;
      continue;
    }
    if (!top_level_seen) return false;

    // Skip re-asks of the same step on the same clause.
    std::size_t j = i;
    while (j > 0 && s[j - 1].step == r.step && s[j - 1].clause == r.clause) --j;
    const StepRecord* prev = j > 0 ? &s[j - 1] : nullptr;
    auto preceded_by = [&](StepId want) { return prev && prev->step == want && prev->clause == r.clause; };
    switch (r.step) {
      case StepId::BinarySplit:
        if (!preceded_by(StepId::UnaryExtract)) return false;
        break;
      case StepId::AtomicityCheck:
        if (!preceded_by(StepId::BinarySplit)) return false;
        break;
      case StepId::Refine:
        if (!preceded_by(StepId::AtomicityCheck)) return false;
        break;
      default:
        break;
    }
  }
  return top_level_seen;
}

RepairExhausted::RepairExhausted(std::vector<validation::Diagnostic> diagnostics, OnionPtr last_tree, StepTrace trace)
    : Error("repair rounds exhausted with " + std::to_string(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                                            [](const auto& d) {
                                                                              return d.severity ==
                                                                                     validation::Severity::Error;
                                                                            })) +
            " error(s) left"),
      diagnostics_(std::move(diagnostics)),
      last_tree_(std::move(last_tree)),
      trace_(std::move(trace)) {}

const std::string& bundled_resource(const std::string& name) { return resources::embedded_files().at(name); }

std::vector<std::string> bundled_resource_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : resources::embedded_files()) names.push_back(k);
  return names;
}

Decomposer::Decomposer(llm::LlmBackend& backend, DecompositionConfig config)
    : backend_(backend), config_(std::move(config)) {
  config_.check();
  const std::string dir = "prompts/" + config_.prompt_template_version + "/";
  try {
    grammar_ = bundled_resource(dir + "grammar.txt");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("unknown prompt template version '" + config_.prompt_template_version + "'");
  }
  try {
    few_shot_ = render_few_shot(bundled_resource("fewshot/" + config_.few_shot_set_id + ".jsonl"));
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("unknown few-shot set '" + config_.few_shot_set_id + "'");
  }
}

std::string Decomposer::render(const std::string& name, const std::string& clause, const std::string& diagnostics,
                               const std::string& tree) const {
  const std::string& tmpl = bundled_resource("prompts/" + config_.prompt_template_version + "/" + name + ".txt");
  const std::string feedback =
      config_.feedback.empty() ? std::string() : "Engineer feedback on an earlier version: " + config_.feedback + "\n";
  return render_slots(tmpl, {{"GRAMMAR", grammar_},
                             {"FEWSHOT", few_shot_},
                             {"CLAUSE", clause},
                             {"DIAGNOSTICS", diagnostics},
                             {"TREE", tree},
                             {"FEEDBACK", feedback}});
}

void Decomposer::record(StepId step, const std::string& clause, std::string digest, std::string raw,
                        std::string parsed) {
  trace_.steps.push_back({step, round_, clause, std::move(digest), std::move(raw), std::move(parsed)});
}

json Decomposer::ask(StepId step, const std::string& clause, const std::string& prompt,
                     const std::function<std::optional<std::string>(const json&)>& contract) {
  std::string current = prompt;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const std::string digest = llm::prompt_digest(current);
    const std::string raw = backend_.complete(current, config_.params);
    std::optional<std::string> violation;
    auto j = extract_json(raw);
    if (!j) {
      violation = "response does not contain a JSON object";
    } else {
      violation = contract(*j);
    }
    if (!violation) {
      record(step, clause, digest, raw, j->dump());
      return *j;
    }
    record(step, clause, digest, raw, "contract violation: " + *violation);
    if (attempt == 1) {
      throw ProtocolError(std::string(to_string(step)) + " response violates its contract twice: " + *violation);
    }
    current = prompt + "\nYour previous answer was rejected (" + *violation +
              "). Reply with exactly one JSON object in the format above.\n";
  }
  throw ProtocolError("unreachable");
}

std::pair<ScopeFinding, std::string> Decomposer::extract_scope(const std::string& clause) {
  if (trim(clause).empty()) throw std::invalid_argument("clause must not be empty");
  auto j = ask(StepId::ExtractScope, clause, render("step1_scope", clause), [](const json& r) -> std::optional<std::string> {
    if (!r.contains("scope") || !r["scope"].is_string()) return "'scope' must be a string";
    const std::string scope = lower(r["scope"].get<std::string>());
    if (scope != "temporal" && scope != "mode" && scope != "none") return "'scope' must be Temporal, Mode or None";
    if (auto e = need_text(r, "clause")) return e;
    if (r.contains("atomic") && !r["atomic"].is_boolean() && !r["atomic"].is_null()) return "'atomic' must be a boolean";
    if (scope == "temporal") {
      if (!r.contains("op") || !r["op"].is_string() || !ir::parse_scope_op(r["op"].get<std::string>())) {
        return "'op' must name a scope operator";
      }
    }
    if (scope == "mode" && (!r.contains("condition") || !condition_of(r["condition"]))) {
      return "'condition' must be an atomic proposition";
    }
    return std::nullopt;
  });
  ScopeFinding f;
  const std::string scope = lower(j["scope"].get<std::string>());
  if (scope == "temporal") {
    f.kind = ScopeFinding::Kind::Temporal;
    f.op = *ir::parse_scope_op(j["op"].get<std::string>());
  } else if (scope == "mode") {
    f.kind = ScopeFinding::Kind::Mode;
    f.condition = *condition_of(j["condition"]);
    if (config_.lifted_mode) {
      std::smatch m;
      if (std::regex_search(f.condition.var, m, placeholder_token())) f.condition = lifted_ap(m.str());
    }
  }
  f.clause_is_atomic = j.contains("atomic") && j["atomic"].is_boolean() && j["atomic"].get<bool>();
  return {f, trim(j["clause"].get<std::string>())};
}

AtomicProposition Decomposer::normalize_ap(const std::string& clause) {
  if (config_.lifted_mode) {
    std::smatch m;
    if (std::regex_search(clause, m, placeholder_token())) {
      AtomicProposition ap = lifted_ap(m.str());
      record(StepId::NormalizeAP, clause, "", "", ir::to_json(ap).dump());
      return ap;
    }
  }
  auto j = ask(StepId::NormalizeAP, clause, render("step6_normalize", clause), ap_contract);
  AtomicProposition ap = ir::ap_from_json(j, ir::DecodeMode::Lenient);
  ap.var = trim(ap.var);
  if (ap.formula) ap.formula = trim(*ap.formula);
  return ap;
}

OnionPtr Decomposer::decompose_clause(const std::string& clause, int depth_budget) {
  if (depth_budget < 1) throw DepthExceeded("decomposition deeper than the depth budget at '" + clause + "'");
  if (config_.lifted_mode && std::regex_match(trim(clause), placeholder_token())) {
    return OnionNode::atomic(normalize_ap(clause));
  }

  auto unary = ask(StepId::UnaryExtract, clause, render("step3_unary", clause), [](const json& r) -> std::optional<std::string> {
    if (auto e = need_bool(r, "unary")) return e;
    if (!r["unary"].get<bool>()) return std::nullopt;
    if (!r.contains("op") || !r["op"].is_string() || !ir::parse_scope_op(r["op"].get<std::string>())) {
      return "'op' must name a scope operator";
    }
    return need_text(r, "clause");
  });
  if (unary["unary"].get<bool>()) {
    return OnionNode::scope(*ir::parse_scope_op(unary["op"].get<std::string>()),
                            decompose_clause(trim(unary["clause"].get<std::string>()), depth_budget - 1));
  }

  auto binary = ask(StepId::BinarySplit, clause, render("step4_binary", clause), [](const json& r) -> std::optional<std::string> {
    if (auto e = need_bool(r, "binary")) return e;
    if (!r["binary"].get<bool>()) return std::nullopt;
    if (!r.contains("op") || !r["op"].is_string() || !ir::parse_relation_op(r["op"].get<std::string>())) {
      return "'op' must name a relation operator";
    }
    for (const char* side : {"left", "right"}) {
      if (r.contains(side) && !r[side].is_string() && !r[side].is_null()) {
        return std::string("'") + side + "' must be a string";
      }
    }
    return std::nullopt;
  });
  if (binary["binary"].get<bool>()) {
    // A missing operand yields a one-child relation; the validator reports
    // it and the repair loop gets a chance to fix it.
    std::vector<OnionPtr> kids;
    for (const char* side : {"left", "right"}) {
      if (binary.contains(side) && binary[side].is_string()) {
        const std::string part = trim(binary[side].get<std::string>());
        if (!part.empty()) kids.push_back(decompose_clause(part, depth_budget - 1));
      }
    }
    return OnionNode::raw(NodeKind::Relation, *ir::parse_relation_op(binary["op"].get<std::string>()), std::nullopt,
                          std::move(kids));
  }

  auto atomic = ask(StepId::AtomicityCheck, clause, render("step5_atomic", clause),
                    [](const json& r) { return need_bool(r, "atomic"); });
  if (atomic["atomic"].get<bool>()) return OnionNode::atomic(normalize_ap(clause));

  auto refined = ask(StepId::Refine, clause, render("step5_refine", clause),
                     [](const json& r) { return need_text(r, "clause"); });
  return decompose_clause(trim(refined["clause"].get<std::string>()), depth_budget - 1);
}

OnionPtr Decomposer::repair(const OnionPtr& tree, const validation::ValidationReport& report,
                            const std::string& requirement) {
  auto first = std::find_if(report.diagnostics.begin(), report.diagnostics.end(),
                            [](const auto& d) { return d.severity == validation::Severity::Error; });
  ir::NodePath target = first->path;
  if (!target.empty() && target.steps.back() == ir::PathStep::Condition) target.steps.pop_back();
  const OnionPtr failing = ir::subtree_at(tree, target);

  const std::string prompt =
      render("repair", requirement, validation::to_json_lines(report.diagnostics), ir::to_json(failing).dump(2));
  OnionPtr replacement;
  ask(StepId::Repair, requirement, prompt, [&](const json& r) -> std::optional<std::string> {
    if (!r.contains("subtree")) return "'subtree' is required";
    try {
      replacement = ir::from_json(r["subtree"], ir::DecodeMode::Lenient, "/subtree");
    } catch (const SchemaError& e) {
      return std::string(e.what());
    }
    return std::nullopt;
  });
  return ir::edit_node(tree, target, replacement);
}

DecompositionResult Decomposer::decompose(const std::string& requirement) {
  if (trim(requirement).empty()) throw std::invalid_argument("requirement must not be empty");
  trace_ = {};
  round_ = 0;

  auto [finding, rest] = extract_scope(trim(requirement));
  json top;
  switch (finding.kind) {
    case ScopeFinding::Kind::Temporal:
      top = {{"root", std::string(ir::to_string(finding.op))}};
      break;
    case ScopeFinding::Kind::Mode:
      top = {{"root", "Globally"}, {"mode", ir::render_ap(finding.condition)}};
      break;
    case ScopeFinding::Kind::None:
      top = {{"root", "Globally"}, {"default", true}};
      break;
  }
  top["clause"] = rest;
  record(StepId::TopLevel, rest, "", "", top.dump());

  OnionPtr body = finding.clause_is_atomic ? OnionNode::atomic(normalize_ap(rest))
                                           : decompose_clause(rest, config_.depth_budget - 1);
  OnionPtr tree;
  switch (finding.kind) {
    case ScopeFinding::Kind::Temporal:
      tree = OnionNode::scope(finding.op, body);
      break;
    case ScopeFinding::Kind::Mode:
      tree = OnionNode::scope(ir::ScopeOp::Globally, OnionNode::mode(finding.condition, body));
      break;
    case ScopeFinding::Kind::None:
      tree = OnionNode::scope(ir::ScopeOp::Globally, body);
      break;
  }

  while (true) {
    auto report = validation::validate(tree);
    if (!report.has_errors()) return {tree, trace_, std::move(report), round_};
    if (round_ >= config_.max_repair_rounds) throw RepairExhausted(report.diagnostics, tree, trace_);
    ++round_;
    tree = repair(tree, report, requirement);
  }
}

namespace {

class ReplayBackend : public llm::LlmBackend {
 public:
  explicit ReplayBackend(const StepTrace& trace) {
    for (const auto& r : trace.steps) {
      if (!r.prompt_digest.empty()) calls_.push_back(&r);
    }
  }

  std::string complete(const std::string& prompt, const llm::GenerationParams&) override {
    if (next_ >= calls_.size()) throw ProtocolError("replay asked for more responses than the trace holds");
    const StepRecord& r = *calls_[next_++];
    if (llm::prompt_digest(prompt) != r.prompt_digest) {
      throw ProtocolError("prompt for replayed call " + std::to_string(next_) + " (" +
                          std::string(to_string(r.step)) + ") does not match the recorded digest");
    }
    return r.raw_response;
  }
  std::string name() const override { return "replay"; }

 private:
  std::vector<const StepRecord*> calls_;
  std::size_t next_ = 0;
};

}  // namespace

DecompositionResult replay_trace(const StepTrace& trace, const std::string& requirement,
                                 const DecompositionConfig& config) {
  ReplayBackend backend(trace);
  return Decomposer(backend, config).decompose(requirement);
}

}  // namespace req2ltl::decomp
