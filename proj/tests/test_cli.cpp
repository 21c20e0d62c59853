#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "cli.hpp"
#include "qmoney/hidden_subspace.hpp"

using namespace qmoney;
using namespace qmoney::lab;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_args(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

double json_metric(const nlohmann::json& j, const std::string& name) {
  for (const auto& m : j.at("metrics"))
    if (m.at("name") == name) return m.at("value").get<double>();
  throw std::out_of_range("no metric " + name);
}

/// Runs the installed binary through the shell; returns (exit status, stdout).
std::pair<int, std::string> run_binary(const std::string& args) {
  const std::string cmd = std::string(QMONEY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  for (std::size_t k; (k = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, k);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("qmoney_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

// ---- report formatting --------------------------------------------------------

TEST(EmitReport, EmptyMetricListIsHeaderOnlyCsv) {
  ExperimentReport r;
  EXPECT_EQ(emit_report(r, "csv"), "metric,value,ci_low,ci_high,trials\n");
}

TEST(EmitReport, CsvRowsUseTwelveSignificantDigits) {
  ExperimentReport r;
  r.add(exact("third", 1.0 / 3));
  r.add(proportion("p", 1, 4));
  const std::string csv = emit_report(r, "csv");
  EXPECT_NE(csv.find("\nthird,0.333333333333,0.333333333333,0.333333333333,0\n"), std::string::npos);
  EXPECT_NE(csv.find("\np,0.25,"), std::string::npos);
}

TEST(EmitReport, JsonRoundTripsAndKeysAreSorted) {
  ExperimentReport r;
  r.command = "wiesner";
  r.config = {{"seed", 5}, {"n", 2}};
  r.add(proportion("both_pass", 39, 100));
  r.require(false, "example");
  const std::string bytes = emit_report(r, "json");
  const auto j = nlohmann::json::parse(bytes);
  EXPECT_EQ(j.at("command"), "wiesner");
  EXPECT_EQ(j.at("library_version"), QMONEY_VERSION);
  EXPECT_FALSE(j.at("invariants_ok").get<bool>());
  EXPECT_EQ(j.at("violations").at(0), "example");
  EXPECT_DOUBLE_EQ(json_metric(j, "both_pass"), 0.39);
  EXPECT_EQ(j.at("metrics").at(0).at("trials"), 100);
  EXPECT_FALSE(j.contains("wall_seconds"));
  EXPECT_EQ(j.dump(2) + "\n", bytes);
  EXPECT_LT(bytes.find("\"command\""), bytes.find("\"config\""));
  EXPECT_LT(bytes.find("\"n\""), bytes.find("\"seed\""));
}

TEST(EmitReport, SampledMetricCarriesThreeSigmaInterval) {
  const auto m = proportion("x", 500, 1000);
  EXPECT_EQ(m.trials, 1000);
  EXPECT_NEAR(m.ci_high - m.value, 3 * std::sqrt(0.25 / 1000), 1e-15);
  EXPECT_NEAR(m.value - m.ci_low, 3 * std::sqrt(0.25 / 1000), 1e-15);
  const auto edge = proportion("y", 0, 10);
  EXPECT_EQ(edge.ci_low, 0.0);
  EXPECT_EQ(edge.ci_high, 0.0);
}

TEST(EmitReport, UnknownFormatAndUnwritablePathThrow) {
  EXPECT_THROW(emit_report(ExperimentReport{}, "xml"), std::invalid_argument);
  EXPECT_THROW(write_output("/nonexistent-dir/report.json", "{}"), std::runtime_error);
}

// ---- experiments through run() ------------------------------------------------

TEST(Cli, SelftestExitsZero) {
  const auto o = run_args({"selftest", "--seed", "1"});
  EXPECT_EQ(o.code, kOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_TRUE(j.at("invariants_ok").get<bool>());
  for (const auto& m : j.at("metrics")) EXPECT_EQ(m.at("value"), 0) << m.at("name");
}

TEST(Cli, WiesnerNaiveMatchesFiveEighthsPower) {
  const auto o = run_args({"wiesner", "--n", "4", "--trials", "100000", "--attack", "naive", "--seed", "7"});
  ASSERT_EQ(o.code, kOk) << o.err;
  const auto j = nlohmann::json::parse(o.out);
  EXPECT_NEAR(json_metric(j, "both_pass"), std::pow(5.0 / 8, 4), 0.01);
  EXPECT_EQ(j.at("config").at("seed"), 7);
  EXPECT_EQ(j.at("config").at("n"), 4);
}

TEST(Cli, SameSeedGivesIdenticalBytes) {
  const std::vector<std::string> args{"wiesner", "--n", "3", "--trials", "2000", "--seed", "42"};
  const auto a = run_args(args);
  const auto b = run_args(args);
  ASSERT_EQ(a.code, kOk);
  EXPECT_EQ(a.out, b.out);
  const auto c = run_args({"wiesner", "--n", "3", "--trials", "2000", "--seed", "43"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, SeedDefaultsFromEnvironment) {
  ::setenv("QMONEY_SEED", "99", 1);
  const auto from_env = run_args({"bbbw", "--n", "2", "--trials", "500"});
  ::unsetenv("QMONEY_SEED");
  const auto explicit_seed = run_args({"bbbw", "--n", "2", "--trials", "500", "--seed", "99"});
  ASSERT_EQ(from_env.code, kOk);
  EXPECT_EQ(from_env.out, explicit_seed.out);
}

TEST(Cli, OptimalCloneValueIsThreeQuarters) {
  const auto o = run_args({"clonopt", "--n", "1", "--trials", "2000", "--seed", "3"});
  ASSERT_EQ(o.code, kOk) << o.err;
  EXPECT_NEAR(json_metric(nlohmann::json::parse(o.out), "value"), 0.75, 0.01);
}

TEST(Cli, CsvFormatHasHeader) {
  const auto o = run_args({"grover", "--n", "4", "--format", "csv", "--seed", "1"});
  ASSERT_EQ(o.code, kOk);
  EXPECT_EQ(o.out.rfind("metric,value,ci_low,ci_high,trials\n", 0), 0u);
}

TEST(Cli, TimingAddsWallSeconds) {
  const auto o = run_args({"grover", "--n", "4", "--timing", "--seed", "1"});
  ASSERT_EQ(o.code, kOk);
  EXPECT_GE(nlohmann::json::parse(o.out).at("wall_seconds").get<double>(), 0.0);
}

TEST(Cli, OutputFlagWritesFile) {
  const auto path = temp_path("report.json");
  const auto o = run_args({"simon", "--n", "4", "--trials", "5", "--seed", "2", "-o", path.string()});
  ASSERT_EQ(o.code, kOk) << o.err;
  EXPECT_TRUE(o.out.empty());
  std::ifstream f(path);
  const auto j = nlohmann::json::parse(f);
  EXPECT_EQ(j.at("command"), "simon");
  std::filesystem::remove(path);
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run_args({}).code, kUsage);
  EXPECT_EQ(run_args({"teleport"}).code, kUsage);
  const auto o = run_args({"wiesner", "--bogus"});
  EXPECT_EQ(o.code, kUsage);
  EXPECT_NE(o.err.find("--bogus"), std::string::npos);
  EXPECT_NE(o.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_args({"wiesner", "--trials", "0"}).code, kUsage);
  EXPECT_EQ(run_args({"wiesner", "--format", "xml"}).code, kUsage);
  EXPECT_EQ(run_args({"hs", "--n", "5"}).code, kUsage);
  EXPECT_EQ(run_args({"simon", "-o", "/nonexistent-dir/x.json", "--n", "3", "--trials", "1"}).code, kUsage);
}

TEST(Cli, EverySubcommandRunsSmall) {
  const std::vector<std::vector<std::string>> cases = {
      {"bomb", "--trials", "200"},
      {"attack", "--kind", "bomb", "--trials", "50"},
      {"attack", "--kind", "adaptive", "--n", "4", "--trials", "5"},
      {"attack", "--kind", "noisy", "--trials", "2"},
      {"attack", "--kind", "secred", "--trials", "100"},
      {"wiesner", "--attack", "optimal", "--n", "1", "--trials", "200", "--iters", "300"},
      {"wiesner", "--attack", "none", "--n", "3", "--trials", "10"},
      {"hs", "--n", "4", "--trials", "2"},
      {"hh"},
      {"hh", "--mode", "disjoint", "--n", "2"}};
  for (auto args : cases) {
    args.insert(args.end(), {"--seed", "11"});
    const auto o = run_args(args);
    EXPECT_EQ(o.code, kOk) << args[0] << ": " << o.err;
    EXPECT_TRUE(nlohmann::json::parse(o.out).at("invariants_ok").get<bool>()) << args[0];
  }
}

// ---- banknote serialization ---------------------------------------------------

TEST(NoteJson, RoundTrip) {
  Rng rng(5);
  HsOracle o;
  const auto note = hs_mint(o.issue(4, rng));
  const auto j = note_to_json(note);
  const auto back = note_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.serial, note.serial);
  EXPECT_EQ(back.state.n(), 4);
  EXPECT_LT((back.state.amps() - note.state.amps()).norm(), 1e-15);
}

TEST(NoteJson, RejectsMalformed) {
  nlohmann::json j = {{"serial", "ab"}, {"n", 1}, {"amplitudes", {{1.0, 0.0}, {0.0, 0.0}}}};
  EXPECT_NO_THROW(note_from_json(j));
  auto bad = j;
  bad["serial"] = "AB";
  EXPECT_THROW(note_from_json(bad), std::invalid_argument);
  bad = j;
  bad["amplitudes"] = {{1.0, 0.0}};
  EXPECT_THROW(note_from_json(bad), std::invalid_argument);
  bad = j;
  bad["amplitudes"] = {{1.0}, {0.0, 0.0}};
  EXPECT_THROW(note_from_json(bad), std::invalid_argument);
}

TEST(NoteJson, HsNoteOutWritesLoadableNote) {
  const auto path = temp_path("note.json");
  const auto o = run_args({"hs", "--n", "4", "--trials", "1", "--seed", "8", "--note-out", path.string()});
  ASSERT_EQ(o.code, kOk) << o.err;
  std::ifstream f(path);
  const auto note = note_from_json(nlohmann::json::parse(f));
  EXPECT_EQ(note.state.n(), 4);
  EXPECT_NEAR(note.state.amps().norm(), 1.0, 1e-10);
  std::filesystem::remove(path);
}

// ---- the installed binary -------------------------------------------------------

TEST(CliBinary, ExitCodesAndDeterminism) {
  const auto ok = run_binary("selftest --seed 4");
  EXPECT_EQ(ok.first, 0);
  EXPECT_EQ(ok.second, run_binary("selftest --seed 4").second);
  EXPECT_EQ(run_binary("wiesner --nope").first, 1);
  EXPECT_EQ(run_binary("").first, 1);
  EXPECT_EQ(run_binary("--help").first, 0);
}

TEST(CliBinary, MatchesInProcessRun) {
  const auto bin = run_binary("grover --n 5 --seed 6");
  ASSERT_EQ(bin.first, 0);
  EXPECT_EQ(bin.second, run_args({"grover", "--n", "5", "--seed", "6"}).out);
}
