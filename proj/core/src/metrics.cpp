#include "req2ltl/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "req2ltl/errors.hpp"
#include "req2ltl/translator.hpp"

namespace req2ltl::metrics {

using nlohmann::json;

namespace {

std::string collapse_spaces(const std::string& s) {
  std::string out;
  bool pending = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending = !out.empty();
      continue;
    }
    if (pending) out += ' ';
    pending = false;
    out += c;
  }
  return out;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::set<std::string> normalized_aps(const ltl::Formula& f) {
  std::set<std::string> out;
  for (const auto& a : ltl::collect_aps(f)) out.insert(normalize_ap(a));
  return out;
}

}  // namespace

std::vector<CorpusPair> parse_corpus(const std::string& text) {
  std::vector<CorpusPair> out;
  std::set<std::string> ids;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(where, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError(where, "expected an object");
    for (const char* key : {"id", "nl", "ltl"}) {
      if (!j.contains(key) || !j[key].is_string()) throw SchemaError(where + "/" + key, "expected a string");
    }
    bool lifted = false;
    if (j.contains("lifted")) {
      if (!j["lifted"].is_boolean()) throw SchemaError(where + "/lifted", "expected a boolean");
      lifted = j["lifted"].get<bool>();
    }
    std::optional<std::map<std::string, std::string>> placeholders;
    if (j.contains("placeholders") && !j["placeholders"].is_null()) {
      const auto& m = j["placeholders"];
      if (!m.is_object()) throw SchemaError(where + "/placeholders", "expected an object");
      placeholders.emplace();
      for (const auto& [k, v] : m.items()) {
        if (!v.is_string()) throw SchemaError(where + "/placeholders/" + k, "expected a string");
        (*placeholders)[k] = v.get<std::string>();
      }
    }
    const std::string id = j["id"].get<std::string>();
    if (!ids.insert(id).second) throw SchemaError(where + "/id", "duplicate id '" + id + "'");
    const std::string gold_text = j["ltl"].get<std::string>();
    std::optional<ltl::Formula> gold;
    try {
      gold = ltl::parse_ltl(gold_text);
    } catch (const SyntaxError& e) {
      throw ParseError(id, e.what());
    }
    if (lifted) {
      for (const auto& a : ltl::collect_aps(*gold)) {
        if (ltl::is_placeholder(a) && (!placeholders || !placeholders->count(a))) {
          throw SchemaError(where + "/placeholders", "no mapping for " + a);
        }
      }
    }
    out.push_back({id, j["nl"].get<std::string>(), gold_text, *gold, lifted, std::move(placeholders)});
  }
  return out;
}

std::vector<CorpusPair> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str());
}

std::string normalize_ap(const std::string& atom) {
  std::string text = collapse_spaces(atom);
  try {
    auto f = ltl::parse_ltl(text);
    if (f.is_atom()) return f.text();
  } catch (const Error&) {
  }
  return text;
}

double ap_recall(const ltl::Formula& predicted, const ltl::Formula& gold) {
  const auto g = normalized_aps(gold);
  if (g.empty()) return 1.0;
  const auto p = normalized_aps(predicted);
  std::size_t hit = 0;
  for (const auto& a : g) hit += p.count(a);
  return static_cast<double>(hit) / static_cast<double>(g.size());
}

AbstractedTokens abstract_tokens(const ltl::Formula& predicted, const ltl::Formula& gold) {
  std::map<std::string, std::string> names;
  AbstractedTokens out;
  for (const auto& t : ltl::print_tokens(gold)) {
    if (t.kind != ltl::PrintToken::Kind::Atom) {
      out.gold.push_back(t.text);
      continue;
    }
    auto [it, fresh] = names.emplace(normalize_ap(t.text), "");
    if (fresh) it->second = "P" + std::to_string(names.size());
    out.gold.push_back(it->second);
  }
  for (const auto& t : ltl::print_tokens(predicted)) {
    if (t.kind != ltl::PrintToken::Kind::Atom) {
      out.predicted.push_back(t.text);
      continue;
    }
    auto it = names.find(normalize_ap(t.text));
    out.predicted.push_back(it == names.end() ? "PX" : it->second);
  }
  return out;
}

double bleu_score(const std::vector<std::string>& candidate, const std::vector<std::string>& reference, int max_n) {
  if (max_n < 1) throw std::invalid_argument("max_n must be positive");
  if (candidate.empty()) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    std::map<std::vector<std::string>, std::size_t> ref_counts;
    for (std::size_t i = 0; i + un <= reference.size(); ++i) {
      ++ref_counts[{reference.begin() + static_cast<std::ptrdiff_t>(i),
                    reference.begin() + static_cast<std::ptrdiff_t>(i + un)}];
    }
    std::map<std::vector<std::string>, std::size_t> cand_counts;
    std::size_t total = 0;
    for (std::size_t i = 0; i + un <= candidate.size(); ++i, ++total) {
      ++cand_counts[{candidate.begin() + static_cast<std::ptrdiff_t>(i),
                     candidate.begin() + static_cast<std::ptrdiff_t>(i + un)}];
    }
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(count, it->second);
    }
    log_sum += std::log(static_cast<double>(clipped + 1) / static_cast<double>(total + 1));
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum / max_n);
}

double bleu(const ltl::Formula& predicted, const ltl::Formula& gold) {
  const auto t = abstract_tokens(predicted, gold);
  return bleu_score(t.predicted, t.gold);
}

Pipeline identity_pipeline() {
  return [](const CorpusPair& p) { return p.gold_text; };
}

Pipeline decomposition_pipeline(llm::LlmBackend& backend, decomp::DecompositionConfig cfg) {
  return [&backend, cfg](const CorpusPair& p) {
    auto c = cfg;
    c.lifted_mode = cfg.lifted_mode || p.lifted;
    auto result = decomp::decompose(p.nl, c, backend);
    return ltl::print_ltl(synth::translate(result.tree));
  };
}

PairResult score_pair(const CorpusPair& pair, const std::string& predicted, const EvalOptions& opts) {
  PairResult r;
  r.id = pair.id;
  r.predicted = predicted;
  std::optional<ltl::Formula> pred;
  try {
    pred = ltl::parse_ltl(predicted);
  } catch (const Error& e) {
    r.error = e.what();
    return r;
  }
  r.syntax_valid = true;
  r.structural_match = ltl::print_ltl(*pred) == ltl::print_ltl(pair.gold);
  if (opts.oracle_mode == OracleMode::WithBoundedEquiv) {
    try {
      r.bounded_equiv_match = ltl::bounded_equiv(*pred, pair.gold, opts.equiv);
    } catch (const TooManyAPs&) {
    }
  }
  r.ap_recall = ap_recall(*pred, pair.gold);
  r.bleu = bleu(*pred, pair.gold);
  return r;
}

Aggregates aggregate(const std::vector<PairResult>& per_pair) {
  Aggregates a;
  a.pairs = per_pair.size();
  if (per_pair.empty()) return a;
  std::size_t valid = 0;
  std::size_t structural = 0;
  std::size_t equiv = 0;
  double recall = 0.0;
  double bleu_sum = 0.0;
  for (const auto& r : per_pair) {
    valid += r.syntax_valid;
    structural += r.structural_match;
    if (r.bounded_equiv_match) {
      ++a.bounded_equiv_evaluated;
      equiv += *r.bounded_equiv_match;
    }
    recall += r.ap_recall;
    bleu_sum += r.bleu;
  }
  const double n = static_cast<double>(a.pairs);
  a.syntax_validity = static_cast<double>(valid) / n;
  a.structural_match = static_cast<double>(structural) / n;
  if (a.bounded_equiv_evaluated > 0) {
    a.bounded_equiv_match = static_cast<double>(equiv) / static_cast<double>(a.bounded_equiv_evaluated);
  }
  a.ap_recall = recall / n;
  a.bleu = bleu_sum / n;
  return a;
}

EvalReport evaluate(const std::vector<CorpusPair>& corpus, const Pipeline& pipeline, const EvalOptions& opts) {
  std::vector<PairResult> results(corpus.size());
  auto run_one = [&](std::size_t i) {
    const auto& pair = corpus[i];
    try {
      results[i] = score_pair(pair, pipeline(pair), opts);
    } catch (const std::exception& e) {
      results[i].id = pair.id;
      results[i].error = e.what();
    }
  };
  const unsigned workers = std::min<std::size_t>(std::max(1u, opts.threads), std::max<std::size_t>(1, corpus.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < corpus.size();) run_one(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  EvalReport report;
  report.aggregates = aggregate(results);
  report.per_pair = std::move(results);
  report.run_metadata = opts.metadata;
  if (report.run_metadata.timestamp.empty()) report.run_metadata.timestamp = utc_now();
  return report;
}

json to_json(const EvalReport& report) {
  json pairs = json::array();
  for (const auto& r : report.per_pair) {
    json p = {{"id", r.id},
              {"syntaxValid", r.syntax_valid},
              {"structuralMatch", r.structural_match},
              {"boundedEquivMatch", r.bounded_equiv_match ? json(*r.bounded_equiv_match) : json(nullptr)},
              {"apRecall", r.ap_recall},
              {"bleu", r.bleu},
              {"predicted", r.predicted}};
    if (r.error) p["error"] = *r.error;
    pairs.push_back(std::move(p));
  }
  const auto& a = report.aggregates;
  return {{"perPair", std::move(pairs)},
          {"aggregates",
           {{"pairs", a.pairs},
            {"syntaxValidity", a.syntax_validity},
            {"structuralMatch", a.structural_match},
            {"boundedEquivMatch", a.bounded_equiv_match ? json(*a.bounded_equiv_match) : json(nullptr)},
            {"boundedEquivEvaluated", a.bounded_equiv_evaluated},
            {"apRecall", a.ap_recall},
            {"bleu", a.bleu}}},
          {"runMetadata",
           {{"backend", report.run_metadata.backend},
            {"templateVersion", report.run_metadata.template_version},
            {"timestamp", report.run_metadata.timestamp}}}};
}

EvalReport report_from_json(const json& j) {
  try {
    EvalReport report;
    for (const auto& p : j.at("perPair")) {
      PairResult r;
      r.id = p.at("id").get<std::string>();
      r.syntax_valid = p.at("syntaxValid").get<bool>();
      r.structural_match = p.at("structuralMatch").get<bool>();
      if (!p.at("boundedEquivMatch").is_null()) r.bounded_equiv_match = p["boundedEquivMatch"].get<bool>();
      r.ap_recall = p.at("apRecall").get<double>();
      r.bleu = p.at("bleu").get<double>();
      r.predicted = p.value("predicted", "");
      if (p.contains("error")) r.error = p["error"].get<std::string>();
      report.per_pair.push_back(std::move(r));
    }
    const auto& a = j.at("aggregates");
    report.aggregates.pairs = a.at("pairs").get<std::size_t>();
    report.aggregates.syntax_validity = a.at("syntaxValidity").get<double>();
    report.aggregates.structural_match = a.at("structuralMatch").get<double>();
    if (!a.at("boundedEquivMatch").is_null()) report.aggregates.bounded_equiv_match = a["boundedEquivMatch"].get<double>();
    report.aggregates.bounded_equiv_evaluated = a.at("boundedEquivEvaluated").get<std::size_t>();
    report.aggregates.ap_recall = a.at("apRecall").get<double>();
    report.aggregates.bleu = a.at("bleu").get<double>();
    const auto& m = j.at("runMetadata");
    report.run_metadata = {m.at("backend").get<std::string>(), m.at("templateVersion").get<std::string>(),
                           m.at("timestamp").get<std::string>()};
    return report;
  } catch (const json::exception& e) {
    throw SchemaError("", std::string("malformed report: ") + e.what());
  }
}

std::string summary_table(const EvalReport& report) {
  std::ostringstream os;
  auto yes = [](bool b) { return b ? "yes" : "no"; };
  os << std::left << std::setw(12) << "id" << std::setw(8) << "syntax" << std::setw(8) << "exact" << std::setw(8)
     << "equiv" << std::setw(10) << "apRecall" << "bleu\n";
  os << std::fixed;
  for (const auto& r : report.per_pair) {
    os << std::setw(12) << r.id << std::setw(8) << yes(r.syntax_valid) << std::setw(8) << yes(r.structural_match)
       << std::setw(8) << (r.bounded_equiv_match ? yes(*r.bounded_equiv_match) : "-") << std::setw(10)
       << std::setprecision(3) << r.ap_recall << std::setprecision(3) << r.bleu << "\n";
  }
  const auto& a = report.aggregates;
  auto pct = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(1) << v * 100.0 << "%";
    return s.str();
  };
  os << "\n" << std::setw(22) << "pairs" << a.pairs << "\n";
  os << std::setw(22) << "syntax validity" << pct(a.syntax_validity) << "\n";
  os << std::setw(22) << "structural match" << pct(a.structural_match) << "\n";
  os << std::setw(22) << "bounded equiv match"
     << (a.bounded_equiv_match ? pct(*a.bounded_equiv_match) + " of " + std::to_string(a.bounded_equiv_evaluated)
                               : std::string("n/a"))
     << "\n";
  os << std::setw(22) << "AP recall" << pct(a.ap_recall) << "\n";
  os << std::setw(22) << "BLEU" << std::setprecision(3) << a.bleu << "\n";
  return os.str();
}

}  // namespace req2ltl::metrics
