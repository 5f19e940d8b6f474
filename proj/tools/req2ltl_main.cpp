#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "req2ltl/decomposer.hpp"
#include "req2ltl/errors.hpp"
#include "req2ltl/llm.hpp"
#include "req2ltl/metrics.hpp"
#include "req2ltl/onion_json.hpp"
#include "req2ltl/service.hpp"
#include "req2ltl/translator.hpp"
#include "req2ltl/validator.hpp"

using namespace req2ltl;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kValidation = 2, kBackend = 3, kUsage = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Writes to `out` or stdout.
void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary | std::ios::trunc);
  if (!f) throw UsageError("cannot write '" + out + "'");
  f << text;
}

struct PipelineOptions {
  std::string stub;
  std::string config;
  bool lifted = false;
  int max_repairs = -1;
};

struct Settings {
  decomp::DecompositionConfig decomposition;
  llm::HttpBackendConfig gateway;
  bool gateway_configured = false;
  json raw = json::object();
};

Settings load_settings(const PipelineOptions& o) {
  Settings s;
  if (!o.config.empty()) {
    try {
      s.raw = json::parse(read_file(o.config));
    } catch (const json::parse_error& e) {
      throw UsageError("config '" + o.config + "' is not JSON: " + e.what());
    }
    try {
      s.decomposition = decomp::config_from_json(s.raw);
    } catch (const std::exception& e) {
      throw UsageError("config '" + o.config + "': " + e.what());
    }
  }
  if (o.lifted) s.decomposition.lifted_mode = true;
  if (o.max_repairs >= 0) s.decomposition.max_repair_rounds = o.max_repairs;
  if (o.stub.empty()) {
    try {
      s.gateway = llm::HttpBackendConfig::from_env();
      s.gateway_configured = true;
    } catch (const std::invalid_argument&) {
    }
    if (s.raw.contains("endpoint")) {
      s.gateway.endpoint = s.raw["endpoint"].get<std::string>();
      s.gateway_configured = true;
    }
    if (s.raw.contains("apiKey")) s.gateway.api_key = s.raw["apiKey"].get<std::string>();
    if (s.raw.contains("model")) s.gateway.model = s.raw["model"].get<std::string>();
    if (s.raw.contains("maxInFlight")) s.gateway.max_in_flight = s.raw["maxInFlight"].get<int>();
    if (s.raw.contains("maxRetries")) s.gateway.max_retries = s.raw["maxRetries"].get<int>();
    if (s.decomposition.params.model_name.empty()) s.decomposition.params.model_name = s.gateway.model;
  }
  return s;
}

std::unique_ptr<llm::LlmBackend> make_backend(const PipelineOptions& o, const Settings& s) {
  if (!o.stub.empty()) {
    try {
      return std::make_unique<llm::ScriptedBackend>(llm::ScriptedTranscript::load(o.stub));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  if (!s.gateway_configured) {
    throw UsageError("no backend: pass --stub <transcript> or set REQ2LTL_LLM_ENDPOINT");
  }
  return std::make_unique<llm::HttpBackend>(s.gateway);
}

ir::OnionPtr load_tree(const std::string& path) {
  const auto text = read_file(path);
  return ir::parse_onion_json(text, ir::DecodeMode::Lenient);
}

int run_translate(const std::string& nl, const PipelineOptions& o, const std::string& out, const std::string& trace) {
  if (nl.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("requirement text is empty");
  auto settings = load_settings(o);
  auto backend = make_backend(o, settings);
  try {
    auto result = decomp::decompose(nl, settings.decomposition, *backend);
    if (!trace.empty()) emit(trace, result.trace.to_jsonl());
    emit(out, ltl::print_ltl(synth::translate(result.tree)) + "\n");
    return kOk;
  } catch (const decomp::RepairExhausted& e) {
    if (!trace.empty()) emit(trace, e.trace().to_jsonl());
    std::cout << validation::to_json_lines(e.diagnostics());
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const DepthExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}

int run_validate(const std::string& path, const std::string& out) {
  auto report = validation::validate(load_tree(path));
  emit(out, validation::to_json_lines(report.diagnostics));
  return report.has_errors() ? kValidation : kOk;
}

int run_synthesize(const std::string& path, const std::string& out) {
  auto tree = load_tree(path);
  auto report = validation::validate(tree);
  if (report.has_errors()) {
    std::cout << validation::to_json_lines(report.diagnostics);
    return kValidation;
  }
  emit(out, ltl::print_ltl(synth::translate(tree)) + "\n");
  return kOk;
}

int run_render(const std::string& path, const std::string& out) {
  emit(out, ir::render_mermaid(load_tree(path)));
  return kOk;
}

struct EvalFlags {
  bool identity = false;
  bool equiv = false;
  unsigned threads = 1;
  std::string timestamp;
};

int run_eval(const std::string& corpus_path, const PipelineOptions& o, const EvalFlags& f, const std::string& out) {
  std::vector<metrics::CorpusPair> corpus;
  try {
    corpus = metrics::load_corpus(corpus_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  metrics::EvalOptions opts;
  opts.oracle_mode = f.equiv ? metrics::OracleMode::WithBoundedEquiv : metrics::OracleMode::StructuralOnly;
  opts.threads = f.threads;
  opts.metadata.timestamp = f.timestamp;
  metrics::EvalReport report;
  if (f.identity) {
    opts.metadata.backend = "identity";
    report = metrics::evaluate(corpus, metrics::identity_pipeline(), opts);
  } else {
    auto settings = load_settings(o);
    auto backend = make_backend(o, settings);
    opts.metadata.backend = backend->name();
    opts.metadata.template_version = settings.decomposition.prompt_template_version;
    report = metrics::evaluate(corpus, metrics::decomposition_pipeline(*backend, settings.decomposition), opts);
  }
  std::cout << metrics::summary_table(report);
  const auto doc = metrics::to_json(report).dump(2) + "\n";
  if (out.empty()) {
    std::cout << "\n" << doc;
  } else {
    emit(out, doc);
  }
  return kOk;
}

int run_serve(const PipelineOptions& o, int port, const std::string& host, const std::string& state_dir) {
  auto settings = load_settings(o);
  auto backend = make_backend(o, settings);
  service::ServiceConfig cfg;
  cfg.decomposition = settings.decomposition;
  if (!state_dir.empty()) cfg.state_dir = state_dir;
  else if (settings.raw.contains("stateDir")) cfg.state_dir = settings.raw["stateDir"].get<std::string>();

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::ReviewService svc(*backend, cfg);
  service::HttpApi api(svc);
  const int bound = api.bind(host, port);
  std::cerr << "serving on http://" << host << ":" << bound << " (sessions in " << cfg.state_dir.string() << ")\n";
  std::thread listener([&] { api.listen(); });
  int sig = 0;
  sigwait(&signals, &sig);
  api.stop();
  listener.join();
  return kOk;
}

void add_pipeline_flags(CLI::App* cmd, PipelineOptions& o) {
  cmd->add_option("--stub", o.stub, "Scripted transcript (JSONL) to use instead of a live backend");
  cmd->add_option("--config", o.config, "JSON config: decomposition and gateway settings");
  cmd->add_flag("--lifted", o.lifted, "Keep Prop<k> placeholders verbatim");
  cmd->add_option("--max-repairs", o.max_repairs, "Repair rounds before giving up")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Natural-language requirements to LTL through OnionL decomposition"};
  app.set_version_flag("--version", "req2ltl 0.1.0");
  app.require_subcommand(1);

  PipelineOptions pipeline;
  std::string out;
  std::string input;

  std::string nl;
  std::string trace;
  auto* translate = app.add_subcommand("translate", "Decompose a requirement and print its LTL");
  translate->add_option("requirement", nl, "Requirement text")->required();
  translate->add_option("--out", out, "Write the LTL here instead of stdout");
  translate->add_option("--trace", trace, "Write the step trace (JSONL) here");
  add_pipeline_flags(translate, pipeline);

  auto* validate = app.add_subcommand("validate", "Print diagnostics for an OnionL tree as JSON lines");
  validate->add_option("tree", input, "OnionL JSON file")->required();
  validate->add_option("--out", out, "Output file");

  auto* synthesize = app.add_subcommand("synthesize", "Translate a validated OnionL tree to LTL");
  synthesize->add_option("tree", input, "OnionL JSON file")->required();
  synthesize->add_option("--out", out, "Output file");

  auto* render = app.add_subcommand("render", "Render an OnionL tree as a Mermaid graph");
  render->add_option("tree", input, "OnionL JSON file")->required();
  render->add_option("--out", out, "Output file");

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Score a corpus and print the summary table and JSON report");
  eval->add_option("corpus", input, "Corpus JSONL file")->required();
  eval->add_option("--out", out, "Write the JSON report here");
  eval->add_flag("--identity", eval_flags.identity, "Feed each gold formula back as the prediction");
  eval->add_flag("--equiv", eval_flags.equiv, "Also check bounded equivalence");
  eval->add_option("--threads", eval_flags.threads, "Pairs evaluated in parallel")->check(CLI::PositiveNumber);
  eval->add_option("--timestamp", eval_flags.timestamp, "Fixed run timestamp for reproducible reports");
  add_pipeline_flags(eval, pipeline);

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string state_dir;
  auto* serve = app.add_subcommand("serve", "Host review sessions over HTTP");
  serve->add_option("--port", port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--state-dir", state_dir, "Session directory (default ./.req2ltl/sessions)");
  add_pipeline_flags(serve, pipeline);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*translate) return run_translate(nl, pipeline, out, trace);
    if (*validate) return run_validate(input, out);
    if (*synthesize) return run_synthesize(input, out);
    if (*render) return run_render(input, out);
    if (*eval) return run_eval(input, pipeline, eval_flags, out);
    if (*serve) return run_serve(pipeline, port, host, state_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const llm::BackendError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kBackend;
  } catch (const ProtocolError& e) {
    std::cerr << "backend failure: " << e.what() << "\n";
    return kBackend;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBackend;
  }
  return kUsage;
}
