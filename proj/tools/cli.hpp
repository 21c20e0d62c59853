#pragma once

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "io.hpp"

namespace qmoney::lab {

enum ExitCode { kOk = 0, kUsage = 1, kInvariant = 2 };

inline nlohmann::json config_echo(const ExperimentConfig& c) {
  return {{"n", c.n},         {"trials", c.trials}, {"epsilon", sig12(c.epsilon)}, {"seed", c.seed},
          {"attack", c.attack}, {"kind", c.kind},   {"mode", c.mode},              {"iters", c.iters},
          {"m", c.m},         {"noise", sig12(c.noise)}, {"marked", c.marked},     {"k", c.k}};
}

/// Parses args (without the program name), runs the experiment and writes
/// the report to `out` or to --output. Usage errors go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"quantum money experiments", "qmoney-lab"};
  app.require_subcommand(1);
  ExperimentConfig cfg;
  cfg.seed = default_seed();

  const auto common = [&](CLI::App* s) {
    s->add_option("--seed", cfg.seed, "RNG seed (default: $QMONEY_SEED)");
    s->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--output,-o", cfg.output, "write the report here instead of stdout");
    s->add_flag("--timing", cfg.timing, "include wall-clock seconds (breaks byte-identical reports)");
  };
  const auto sized = [&](CLI::App* s) {
    s->add_option("--n", cfg.n, "qubits per note or problem size")->check(CLI::Range(1, 20));
    s->add_option("--trials", cfg.trials, "number of trials")->check(CLI::PositiveNumber);
  };
  std::map<std::string, std::function<ExperimentReport(const ExperimentConfig&)>> runners = {
      {"selftest", run_selftest}, {"wiesner", run_wiesner}, {"bbbw", run_bbbw},   {"bomb", run_bomb},
      {"attack", run_attack},     {"simon", run_simon},     {"grover", run_grover}, {"hs", run_hs},
      {"hh", run_hh},             {"clonopt", run_clonopt}};

  auto* selftest = app.add_subcommand("selftest", "core invariant sweep");
  common(selftest);
  auto* wiesner = app.add_subcommand("wiesner", "Wiesner money and its counterfeiters");
  common(wiesner);
  sized(wiesner);
  wiesner->add_option("--attack", cfg.attack)->check(CLI::IsMember({"none", "naive", "optimal", "adaptive"}));
  wiesner->add_option("--iters", cfg.iters, "optimizer iterations for --attack optimal")->check(CLI::PositiveNumber);
  auto* bbbw = app.add_subcommand("bbbw", "PRF-keyed Wiesner money");
  common(bbbw);
  sized(bbbw);
  bbbw->add_option("--attack", cfg.attack)->check(CLI::IsMember({"none", "naive"}));
  auto* bomb = app.add_subcommand("bomb", "Elitzur-Vaidman bomb tester");
  common(bomb);
  bomb->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber);
  bomb->add_option("--epsilon", cfg.epsilon)->check(CLI::Range(1e-4, 0.1));
  auto* attack = app.add_subcommand("attack", "attacks on private and public money");
  common(attack);
  sized(attack);
  attack->add_option("--kind", cfg.kind)->check(CLI::IsMember({"bomb", "adaptive", "noisy", "secred"}));
  attack->add_option("--epsilon", cfg.epsilon)->check(CLI::Range(1e-4, 0.05));
  attack->add_option("--m", cfg.m, "polynomials per list")->check(CLI::PositiveNumber);
  attack->add_option("--noise", cfg.noise, "fraction of noisy polynomials")->check(CLI::Range(0.0, 0.3));
  auto* simon = app.add_subcommand("simon", "Simon's algorithm");
  common(simon);
  sized(simon);
  auto* grover = app.add_subcommand("grover", "Grover search");
  common(grover);
  sized(grover);
  grover->add_option("--marked", cfg.marked)->check(CLI::PositiveNumber);
  grover->add_option("--k", cfg.k, "iterates (default: optimal)")->check(CLI::NonNegativeNumber);
  auto* hs = app.add_subcommand("hs", "hidden-subspace mini-scheme and Grover forgery");
  common(hs);
  sized(hs);
  hs->add_option("--note-out", cfg.note_out, "also write one minted note as JSON");
  auto* hh = app.add_subcommand("hh", "Harlow-Hayden decoding demo");
  common(hh);
  sized(hh);
  hh->add_option("--mode", cfg.mode)->check(CLI::IsMember({"equal", "disjoint"}));
  auto* clonopt = app.add_subcommand("clonopt", "optimal single-qubit cloning channel");
  common(clonopt);
  sized(clonopt);
  clonopt->add_option("--iters", cfg.iters)->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  ExperimentReport report;
  try {
    const auto t0 = std::chrono::steady_clock::now();
    report = runners.at(cfg.command)(cfg);
    if (cfg.timing) report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.command == "hs" && !cfg.note_out.empty()) {
      Rng rng(cfg.seed);
      HsOracle o;
      write_output(cfg.note_out, note_to_json(hs_mint(o.issue(detail::or_default(cfg.n, 8), rng))).dump() + "\n");
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvariant;
  }
  report.command = cfg.command;
  report.config = config_echo(cfg);
  const std::string bytes = emit_report(report, cfg.format);
  try {
    if (cfg.output.empty()) out << bytes;
    else write_output(cfg.output, bytes);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  for (const auto& v : report.violations) err << "invariant violated: " << v << "\n";
  return report.invariants_ok ? kOk : kInvariant;
}

}  // namespace qmoney::lab
