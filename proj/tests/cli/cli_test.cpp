#include <gtest/gtest.h>
#include <httplib.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "free_port.hpp"
#include "req2ltl/onion_json.hpp"

extern char** environ;

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kCli = REQ2LTL_CLI;
const std::string kFixtures = REQ2LTL_FIXTURE_DIR;

struct Run {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Run run(const std::vector<std::string>& args, const std::string& env = "") {
  std::string cmd = env + " " + quote(kCli);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), pipe)) > 0;) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("req2ltl-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  std::string transcript(const std::string& name) const { return kFixtures + "/transcripts/" + name; }

  fs::path dir_;
};

const char* kNoEnv = "env -u REQ2LTL_LLM_ENDPOINT";

}  // namespace

TEST_F(Cli, TranslateWarningLight) {
  auto r = run({"translate", "--stub", transcript("warning_light.jsonl"), fixtures::warning_light().nl});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "G (workmode = valid -> F (temperature > 50 -> warning = ON))\n");
}

TEST_F(Cli, TranslateWritesTraceAndOutput) {
  const auto out = (dir_ / "ltl.txt").string();
  const auto trace = (dir_ / "trace.jsonl").string();
  auto r = run({"translate", "--stub", transcript("always_p.jsonl"), "--out", out, "--trace", trace, "always p"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(out), "G p\n");
  std::istringstream lines(slurp(trace));
  int n = 0;
  for (std::string line; std::getline(lines, line); ++n) EXPECT_TRUE(json::parse(line).contains("promptDigest"));
  EXPECT_EQ(n, 3);
}

TEST_F(Cli, TranslateExitCodes) {
  EXPECT_EQ(run({"translate", "--stub", transcript("always_p.jsonl"), ""}).code, 4);
  EXPECT_EQ(run({"translate", "--stub", kFixtures + "/corpus/empty.jsonl", "always p"}).code, 3);
  EXPECT_EQ(run({"translate", "always p"}, kNoEnv).code, 4);
  EXPECT_EQ(run({"translate", "--stub", "/nonexistent.jsonl", "always p"}).code, 4);
  EXPECT_EQ(run({"translate"}).code, 4);
  EXPECT_EQ(run({"frobnicate"}).code, 4);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"translate", "--stub", transcript("always_p.jsonl"), "--max-repairs", "-1", "p"}).code, 4);
}

TEST_F(Cli, TranslateUnrepairedPrintsDiagnostics) {
  auto r = run({"translate", "--stub", transcript("repair_round.jsonl"), "--max-repairs", "0", "If a holds then b holds."});
  EXPECT_EQ(r.code, 2);
  std::istringstream lines(r.out);
  std::string first;
  ASSERT_TRUE(std::getline(lines, first));
  auto d = json::parse(first);
  EXPECT_EQ(d["kind"], "ArityViolation");
  EXPECT_EQ(d["severity"], "Error");

  auto repaired = run({"translate", "--stub", transcript("repair_round.jsonl"), "If a holds then b holds."});
  EXPECT_EQ(repaired.code, 0);
  EXPECT_EQ(repaired.out, "G (a -> b)\n");
}

TEST_F(Cli, TranslateWithConfigFile) {
  const auto cfg = write("cfg.json", R"({"maxRepairRounds":0})");
  EXPECT_EQ(run({"translate", "--stub", transcript("repair_round.jsonl"), "--config", cfg, "If a holds then b holds."}).code, 2);
  const auto lifted = write("lifted.json", R"({"liftedMode":true})");
  auto r = run({"translate", "--stub", transcript("lifted.jsonl"), "--config", lifted,
                "If Prop1 holds then next Prop2 does not hold."});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "G (Prop1 -> X !Prop2)\n");
  EXPECT_EQ(run({"translate", "--stub", transcript("always_p.jsonl"), "--config", write("bad.json", "{"), "p"}).code, 4);
}

TEST_F(Cli, SynthesizeValidateRender) {
  const auto tree = write("tree.json", fixtures::warning_light_json());
  auto syn = run({"synthesize", tree});
  EXPECT_EQ(syn.code, 0);
  EXPECT_EQ(syn.out, "G (workmode = valid -> F (temperature > 50 -> warning = ON))\n");

  auto val = run({"validate", tree});
  EXPECT_EQ(val.code, 0);
  EXPECT_EQ(val.out, "");

  auto ren = run({"render", tree});
  EXPECT_EQ(ren.code, 0);
  EXPECT_EQ(ren.out, req2ltl::ir::render_mermaid(fixtures::warning_light().tree));

  const auto broken = write("broken.json", R"({"type":"relation","op":"And","left":{"type":"atomic","var":"p"}})");
  auto bad = run({"validate", broken});
  EXPECT_EQ(bad.code, 2);
  EXPECT_EQ(json::parse(bad.out)["kind"], "ArityViolation");
  EXPECT_EQ(run({"synthesize", broken}).code, 2);
  EXPECT_EQ(run({"synthesize", write("junk.json", "not json")}).code, 2);
  EXPECT_EQ(run({"render", (dir_ / "missing.json").string()}).code, 4);

  const auto out = (dir_ / "graph.mmd").string();
  EXPECT_EQ(run({"render", tree, "--out", out}).code, 0);
  EXPECT_EQ(slurp(out), ren.out);
}

TEST_F(Cli, EvalMatchesFrozenReport) {
  const auto out = (dir_ / "report.json").string();
  auto r = run({"eval", kFixtures + "/corpus/patterns.jsonl", "--stub", transcript("pattern_runs.jsonl"), "--equiv",
                "--timestamp", "2026-01-01T00:00:00Z", "--out", out});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("structural match      83.3%"), std::string::npos) << r.out;
  EXPECT_EQ(json::parse(slurp(out)), json::parse(slurp(kFixtures + "/golden/pattern_eval.json")));
}

TEST_F(Cli, EvalIdentity) {
  auto r = run({"eval", kFixtures + "/corpus/patterns.jsonl", "--identity"});
  EXPECT_EQ(r.code, 0);
  const auto brace = r.out.find('{');
  ASSERT_NE(brace, std::string::npos);
  auto report = json::parse(r.out.substr(brace));
  EXPECT_EQ(report["aggregates"]["structuralMatch"], 1.0);
  EXPECT_EQ(report["aggregates"]["bleu"], 1.0);
  EXPECT_EQ(report["runMetadata"]["backend"], "identity");
  const auto bad = write("bad.jsonl", R"({"id":"x","nl":"-","ltl":"G ("})");
  EXPECT_EQ(run({"eval", bad, "--identity"}).code, 2);
  EXPECT_EQ(run({"eval", kFixtures + "/corpus/patterns.jsonl"}, kNoEnv).code, 4);
}

TEST_F(Cli, ServeAnswersAndStopsOnSigterm) {
  const int port = fixtures::free_port();
  const std::string port_s = std::to_string(port);
  const std::string stub = transcript("warning_light.jsonl");
  const std::string state = (dir_ / "sessions").string();
  std::vector<std::string> args = {kCli, "serve", "--port", port_s, "--stub", stub, "--state-dir", state};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  ASSERT_EQ(posix_spawn(&pid, kCli.c_str(), nullptr, nullptr, argv.data(), environ), 0);

  httplib::Client cli("127.0.0.1", port);
  bool up = false;
  for (int i = 0; i < 100 && !up; ++i) {
    auto h = cli.Get("/healthz");
    up = h && h->status == 200;
    if (!up) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  ASSERT_TRUE(up);
  auto created = cli.Post("/sessions", json{{"nl", fixtures::warning_light().nl}}.dump(), "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const std::string id = json::parse(created->body)["id"];
  EXPECT_TRUE(fs::exists(fs::path(state) / (id + ".json")));

  EXPECT_EQ(kill(pid, SIGTERM), 0);
  int status = 0;
  waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}
