#pragma once

// Corpus loading and the evaluation harness: syntax validity, structural and
// bounded-equivalence match, AP recall and abstracted BLEU-4.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "req2ltl/decomposer.hpp"
#include "req2ltl/lasso.hpp"
#include "req2ltl/ltl.hpp"

namespace req2ltl::metrics {

struct CorpusPair {
  std::string id;
  std::string nl;
  std::string gold_text;
  ltl::Formula gold;
  bool lifted = false;
  std::optional<std::map<std::string, std::string>> placeholders;
};

// JSONL, one {"id","nl","ltl","lifted"?,"placeholders"?} object per line.
// Throws SchemaError ("line N/...") for malformed lines and ParseError for a
// gold formula that does not parse.
std::vector<CorpusPair> parse_corpus(const std::string& text);
std::vector<CorpusPair> load_corpus(const std::string& path);

// Whitespace collapsed and the relational operator respelled canonically.
std::string normalize_ap(const std::string& atom);

double ap_recall(const ltl::Formula& predicted, const ltl::Formula& gold);

// Token streams with atoms abstracted: gold atoms become P1, P2, .. in order
// of first appearance, predicted atoms reuse the gold names or become PX.
struct AbstractedTokens {
  std::vector<std::string> predicted;
  std::vector<std::string> gold;
};
AbstractedTokens abstract_tokens(const ltl::Formula& predicted, const ltl::Formula& gold);

// BLEU over raw token sequences: uniform weights up to `max_n`, add-one on
// every n-gram precision, standard brevity penalty. An order with no
// candidate n-grams contributes precision 1.
double bleu_score(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
                  int max_n = 4);

double bleu(const ltl::Formula& predicted, const ltl::Formula& gold);

enum class OracleMode { StructuralOnly, WithBoundedEquiv };

// Emits LTL text for one pair. May throw; the pair is then scored invalid.
using Pipeline = std::function<std::string(const CorpusPair&)>;

Pipeline identity_pipeline();
// decompose -> validate -> translate over `backend`. Lifted pairs switch the
// decomposer into lifted mode.
Pipeline decomposition_pipeline(llm::LlmBackend& backend, decomp::DecompositionConfig cfg);

struct PairResult {
  std::string id;
  bool syntax_valid = false;
  bool structural_match = false;
  std::optional<bool> bounded_equiv_match;
  double ap_recall = 0.0;
  double bleu = 0.0;
  std::string predicted;
  std::optional<std::string> error;
};

struct Aggregates {
  std::size_t pairs = 0;
  double syntax_validity = 0.0;
  double structural_match = 0.0;
  std::optional<double> bounded_equiv_match;  // over pairs where it was computed
  std::size_t bounded_equiv_evaluated = 0;
  double ap_recall = 0.0;
  double bleu = 0.0;

  friend bool operator==(const Aggregates&, const Aggregates&) = default;
};

struct RunMetadata {
  std::string backend;
  std::string template_version;
  std::string timestamp;  // ISO 8601 UTC; filled by evaluate when empty
};

struct EvalReport {
  std::vector<PairResult> per_pair;  // sorted by id
  Aggregates aggregates;
  RunMetadata run_metadata;
};

Aggregates aggregate(const std::vector<PairResult>& per_pair);

struct EvalOptions {
  OracleMode oracle_mode = OracleMode::StructuralOnly;
  ltl::BoundedEquivOptions equiv;
  unsigned threads = 1;
  RunMetadata metadata;
};

EvalReport evaluate(const std::vector<CorpusPair>& corpus, const Pipeline& pipeline, const EvalOptions& opts = {});
PairResult score_pair(const CorpusPair& pair, const std::string& predicted, const EvalOptions& opts = {});

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
std::string summary_table(const EvalReport& report);

}  // namespace req2ltl::metrics
