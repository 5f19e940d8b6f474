#pragma once

// Building OnionL trees from requirement text: a two-stage, six-step dialogue
// with a chat backend, one strict JSON object per step, followed by
// validator-driven subtree repair.

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "req2ltl/errors.hpp"
#include "req2ltl/llm.hpp"
#include "req2ltl/onion.hpp"
#include "req2ltl/validator.hpp"

namespace req2ltl::decomp {

struct DecompositionConfig {
  int max_repair_rounds = 3;
  std::string few_shot_set_id = "default";
  bool lifted_mode = false;
  std::string prompt_template_version = "v1";
  int depth_budget = 12;
  llm::GenerationParams params;
  // Engineer feedback for regeneration; fills the {FEEDBACK} slot.
  std::string feedback;

  void check() const;  // std::invalid_argument on negative rounds or budget < 1
};

// Recognized keys: maxRepairRounds, fewShotSetId, liftedMode,
// promptTemplateVersion, depthBudget, model, maxTokens, temperature,
// timeoutMs. Unknown keys are ignored so one file can also carry gateway
// settings.
DecompositionConfig config_from_json(const nlohmann::json& j);

enum class StepId { ExtractScope, TopLevel, UnaryExtract, BinarySplit, AtomicityCheck, NormalizeAP, Refine, Repair };

std::string_view to_string(StepId s) noexcept;
std::optional<StepId> parse_step_id(std::string_view s);

struct StepRecord {
  StepId step = StepId::ExtractScope;
  int round = 0;
  std::string clause;
  std::string prompt_digest;  // empty for steps answered locally
  std::string raw_response;
  std::string parsed_result;  // compact JSON, or "contract violation: ..."
};

struct StepTrace {
  std::vector<StepRecord> steps;

  std::string to_jsonl() const;
  static StepTrace from_jsonl(std::string_view text);
};

// Stage I steps come first, Stage II steps for a clause follow the Alg. 1
// order (unary, binary, atomicity, refine), rounds never decrease and stay
// within `max_rounds`.
bool trace_order_legal(const StepTrace& trace, int max_rounds);

struct ScopeFinding {
  enum class Kind { Temporal, Mode, None };
  Kind kind = Kind::None;
  ir::ScopeOp op = ir::ScopeOp::Globally;  // Temporal
  ir::AtomicProposition condition;         // Mode
  bool clause_is_atomic = false;
};

struct DecompositionResult {
  ir::OnionPtr tree;
  StepTrace trace;
  validation::ValidationReport report;
  int rounds = 0;  // repair rounds used
};

class RepairExhausted : public Error {
 public:
  RepairExhausted(std::vector<validation::Diagnostic> diagnostics, ir::OnionPtr last_tree, StepTrace trace);

  const std::vector<validation::Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  const ir::OnionPtr& last_tree() const noexcept { return last_tree_; }
  const StepTrace& trace() const noexcept { return trace_; }

 private:
  std::vector<validation::Diagnostic> diagnostics_;
  ir::OnionPtr last_tree_;
  StepTrace trace_;
};

// One decomposition session. Steps run strictly in sequence; separate
// sessions may share a backend.
class Decomposer {
 public:
  Decomposer(llm::LlmBackend& backend, DecompositionConfig config);

  DecompositionResult decompose(const std::string& requirement);

  // Individual steps, exposed for testing. Each appends to trace().
  std::pair<ScopeFinding, std::string> extract_scope(const std::string& clause);
  ir::OnionPtr decompose_clause(const std::string& clause, int depth_budget);
  ir::AtomicProposition normalize_ap(const std::string& clause);

  const StepTrace& trace() const noexcept { return trace_; }

 private:
  nlohmann::json ask(StepId step, const std::string& clause, const std::string& prompt,
                     const std::function<std::optional<std::string>(const nlohmann::json&)>& contract);
  std::string render(const std::string& name, const std::string& clause, const std::string& diagnostics = {},
                     const std::string& tree = {}) const;
  void record(StepId step, const std::string& clause, std::string digest, std::string raw, std::string parsed);
  ir::OnionPtr repair(const ir::OnionPtr& tree, const validation::ValidationReport& report,
                      const std::string& requirement);

  llm::LlmBackend& backend_;
  DecompositionConfig config_;
  std::string grammar_;
  std::string few_shot_;
  StepTrace trace_;
  int round_ = 0;
};

inline DecompositionResult decompose(const std::string& requirement, const DecompositionConfig& config,
                                     llm::LlmBackend& backend) {
  return Decomposer(backend, config).decompose(requirement);
}

// Re-runs a decomposition against the raw responses of a saved trace. Every
// prompt must hash to the recorded digest; throws ProtocolError on drift.
DecompositionResult replay_trace(const StepTrace& trace, const std::string& requirement,
                                 const DecompositionConfig& config);

// Named resources bundled into the library ("prompts/v1/step1_scope.txt",
// "fewshot/default.jsonl"). Throws std::out_of_range for unknown names.
const std::string& bundled_resource(const std::string& name);
std::vector<std::string> bundled_resource_names();

}  // namespace req2ltl::decomp
