#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "qmoney/qmoney.hpp"
#include "report.hpp"

namespace qmoney::lab {

struct ExperimentConfig {
  std::string command;
  int n = 0;                 ///< 0: the command's default
  long long trials = 0;      ///< 0: the command's default
  double epsilon = 0.01;
  std::uint64_t seed = 0;
  std::string attack = "naive";
  std::string kind = "bomb";
  std::string mode = "equal";
  int iters = 2000;
  int m = 16;
  double noise = 0.25;
  int marked = 1;
  int k = -1;                ///< Grover iterates; -1 for the optimal count
  std::string format = "json";
  std::string output;        ///< empty: stdout
  bool timing = false;
  std::string note_out;      ///< hs: also write the minted note here
};

namespace detail {

inline int or_default(int v, int d) { return v > 0 ? v : d; }
inline long long or_default(long long v, long long d) { return v > 0 ? v : d; }

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : 0.5 * (xs[h - 1] + xs[h]);
}

}  // namespace detail

// ---- selftest -------------------------------------------------------------------

/// Fast invariant sweep over the core layer; each metric counts violations.
inline ExperimentReport run_selftest(const ExperimentConfig& cfg) {
  ExperimentReport r;
  Rng rng(cfg.seed);
  const auto check = [&](const std::string& name, long long violations, long long cases) {
    r.add({"violations." + name, double(violations), double(violations), double(violations), cases});
    r.require(violations == 0, name);
  };

  {  // Two worked partial traces.
    CVec a(4);
    a << 1, 1, -1, 0;
    const auto rho = partial_trace(to_density(PureState::normalized(a)), {0}).mat();
    CMat want(2, 2);
    want << 2.0 / 3, -1.0 / 3, -1.0 / 3, 1.0 / 3;
    CVec g = CVec::Zero(8);
    g[0] = g[7] = 1;
    const auto ghz = partial_trace(to_density(PureState::normalized(g)), {1, 2}).mat();
    CMat want_ghz = CMat::Zero(4, 4);
    want_ghz(0, 0) = want_ghz(3, 3) = 0.5;
    check("partial_trace_examples",
          ((rho - want).cwiseAbs().maxCoeff() > 1e-12) + ((ghz - want_ghz).cwiseAbs().maxCoeff() > 1e-12), 2);
  }
  {
    long long bad = 0;
    for (int t = 0; t < 200; ++t) {
      Rng s = rng.split(std::uint64_t(t));
      const int n = 1 + int(s.below(4));
      const auto u = Unitary::random(n, s);
      const auto psi = PureState::random(n, s);
      const auto out = apply_unitary(psi, u, qubit_range(0, n));
      bad += std::abs(out.amps().norm() - 1) > 1e-10;
    }
    check("unitary_norm", bad, 200);
  }
  {
    long long bad = 0;
    for (int t = 0; t < 1000; ++t) {
      Rng s = rng.split(1000 + std::uint64_t(t));
      const int n = 1 + int(s.below(2));
      const auto a = DensityMatrix::random(n, s, 1 + int(s.below(4)));
      const auto b = DensityMatrix::random(n, s, 1 + int(s.below(4)));
      const double f = fidelity(a, b), d = trace_distance(a, b);
      bad += (1 - f > d + 1e-9) || (d > std::sqrt(std::max(0.0, 1 - f * f)) + 1e-9);
    }
    check("fidelity_sandwich", bad, 1000);
  }
  {
    long long bad = 0;
    for (int t = 0; t < 500; ++t) {
      Rng s = rng.split(5000 + std::uint64_t(t));
      const int n = 1 + int(s.below(3));
      const double eps = t % 2 ? 0.01 : 0.1;
      const auto rho = DensityMatrix::random(n, s);
      const auto m = random_gentle_measurement(rho, 1, eps, s);
      bad += trace_distance(rho, gentle_measure(rho, m).rho_tilde) > std::sqrt(eps) + 1e-9;
    }
    check("gentle_measurement", bad, 500);
  }
  {
    long long bad = 0, cases = 0;
    for (std::size_t N = 2; N <= 64; N *= 2)
      for (std::size_t M = 1; M <= N; ++M) {
        const int n = log2_exact(N);
        const auto o = BooleanOracle::from_function(n, 1, [&](std::uint64_t x) { return x < M; });
        for (int k = 0; k <= 4; ++k) {
          const auto s = grover_state(o, k);
          double p = 0;
          for (std::size_t x = 0; x < M; ++x) p += std::norm(s[x]);
          bad += std::abs(p - grover_success_probability(N, M, k)) > 1e-9;
          ++cases;
        }
      }
    check("grover_closed_form", bad, cases);
  }
  {
    long long bad = 0;
    for (int t = 0; t < 20; ++t) {
      const auto k = hs_keygen(2 + 2 * int(rng.below(4)), rng);
      CVec x = subspace_state(k.subspace).amps();
      hadamard_all_inplace(x);
      bad += (x - subspace_state(k.dual).amps()).norm() > 1e-12;
    }
    check("hadamard_maps_subspace_to_dual", bad, 20);
  }
  return r;
}

// ---- private-key money --------------------------------------------------------------

/// Both-pass rate of `forge` against fresh notes from `make_bank`, one bank per trial.
template <class MakeBank, class Forge>
Metric both_pass(const std::string& name, long long trials, const Rng& base, MakeBank make_bank, Forge forge) {
  long long both = 0;
  for (long long t = 0; t < trials; ++t) {
    Rng r = base.split(std::uint64_t(t));
    auto bank = make_bank(r.split(1));
    const auto note = bank.mint();
    auto bundle = forge(note, r);
    both += count(bank, bundle, r) == 2;
  }
  return proportion(name, both, trials);
}

inline void adaptive_metrics(ExperimentReport& r, int n, long long trials, const Rng& base) {
  long long ok = 0, logged = 0;
  std::vector<double> queries;
  bool within = true;
  for (long long t = 0; t < trials; ++t) {
    Rng s = base.split(std::uint64_t(t));
    auto bank = make_wiesner_bank(n, BankMode::naive_return, s.split(1));
    const auto note = bank.mint();
    const auto res = adaptive_attack(bank, note, s);
    ok += res.recovered == bank.source().table().at(note.serial);
    logged += static_cast<long long>(bank.total_failures());
    within &= res.queries <= adaptive_query_budget(n);
    queries.push_back(double(res.queries));
  }
  r.add(proportion("recovery_rate", ok, trials));
  r.add(mean_of("queries", queries));
  r.add(exact("query_budget", double(adaptive_query_budget(n))));
  r.add(exact("failures_logged", double(logged)));
  r.require(within, "adaptive attack stayed within its query budget");
  r.require(logged == 0, "naive bank logged no failures");
}

inline ExperimentReport run_wiesner(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 4);
  const long long trials = detail::or_default(cfg.trials, 100000LL);
  const Rng base(cfg.seed);
  const auto strict_bank = [n](Rng b) { return make_wiesner_bank(n, BankMode::strict, b); };
  if (cfg.attack == "none") {
    r.add(both_pass("legit_accept", trials, base, strict_bank, [](const Banknote& note, Rng&) {
      return NoteBundle::from_notes({note, note});
    }));
    r.require(r.metrics.back().value == 1.0, "legitimate notes always verify");
  } else if (cfg.attack == "naive") {
    r.add(both_pass("both_pass", trials, base, strict_bank, naive_counterfeit));
    r.add(exact("expected", std::pow(5.0 / 8.0, n)));
  } else if (cfg.attack == "optimal") {
    Rng opt = base.split(~std::uint64_t{0});
    const auto o = optimize_clone_channel(cfg.iters, opt);
    r.add(exact("optimizer_value", o.value));
    r.add(both_pass("both_pass", trials, base, strict_bank,
                    [&](const Banknote& note, Rng& s) { return optimal_counterfeit(note, o.channel, s); }));
    r.add(exact("expected", std::pow(0.75, n)));
  } else if (cfg.attack == "adaptive") {
    adaptive_metrics(r, n, detail::or_default(cfg.trials, 100LL), base);
  } else {
    throw std::invalid_argument("wiesner: --attack must be none, naive, optimal or adaptive");
  }
  return r;
}

inline ExperimentReport run_bbbw(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 4);
  const long long trials = detail::or_default(cfg.trials, 100000LL);
  const Rng base(cfg.seed);
  const auto bank = [n](Rng b) { return make_bbbw_bank(n, BankMode::strict, PrfKey::random(b), b.split(1)); };
  r.add(both_pass("legit_accept", trials, base, bank, [](const Banknote& note, Rng&) {
    return NoteBundle::from_notes({note, note});
  }));
  r.require(r.metrics.back().value == 1.0, "legitimate notes always verify");
  if (cfg.attack == "naive") {
    r.add(both_pass("both_pass", trials, base.split(7), bank, naive_counterfeit));
    r.add(exact("expected", std::pow(5.0 / 8.0, n)));
  } else if (cfg.attack != "none") {
    throw std::invalid_argument("bbbw: --attack must be none or naive");
  }
  return r;
}

// ---- bomb testing ----------------------------------------------------------------

inline ExperimentReport run_bomb(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const long long trials = detail::or_default(cfg.trials, 100000LL);
  Rng rng(cfg.seed);
  long long exploded = 0, bomb_missed = 0, dud_wrong = 0;
  for (long long t = 0; t < trials; ++t) {
    const auto b = ev_bomb_test(Package::bomb, cfg.epsilon, rng);
    exploded += b.exploded;
    bomb_missed += !b.exploded && b.verdict != BombVerdict::bomb;
    dud_wrong += ev_bomb_test(Package::dud, cfg.epsilon, rng).verdict != BombVerdict::no_bomb;
  }
  r.add(exact("rounds", ev_rounds(cfg.epsilon)));
  r.add(proportion("explosion_rate", exploded, trials));
  r.add(exact("expected_explosion", ev_explosion_probability(cfg.epsilon)));
  r.add(proportion("dud_misjudged", dud_wrong, trials));
  r.add(proportion("surviving_bomb_missed", bomb_missed, trials));
  r.require(dud_wrong == 0, "dud verdict is exact");
  r.require(bomb_missed == 0, "a surviving bomb is always detected");
  return r;
}

// ---- attacks ----------------------------------------------------------------------

inline ExperimentReport run_attack(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const Rng base(cfg.seed);
  if (cfg.kind == "bomb") {
    const int n = detail::or_default(cfg.n, 1);
    const long long trials = detail::or_default(cfg.trials, 10000LL);
    long long caught = 0, right = 0, right_uncaught = 0;
    for (long long t = 0; t < trials; ++t) {
      Rng s = base.split(std::uint64_t(t));
      auto bank = make_wiesner_bank(n, BankMode::strict, s.split(1));
      const auto note = bank.mint();
      const auto res = bomb_attack(bank, note, cfg.epsilon, s);
      const bool ok = res.recovered == bank.source().table().at(note.serial);
      caught += res.caught;
      right += ok;
      right_uncaught += ok && !res.caught;
    }
    r.add(proportion("catch_rate", caught, trials));
    r.add(proportion("accuracy_uncaught", right_uncaught, trials - caught));
    r.add(proportion("accuracy_all", right, trials));
  } else if (cfg.kind == "adaptive") {
    adaptive_metrics(r, detail::or_default(cfg.n, 8), detail::or_default(cfg.trials, 100LL), base);
  } else if (cfg.kind == "noisy") {
    const int n = detail::or_default(cfg.n, 6);
    const long long trials = detail::or_default(cfg.trials, 200LL);
    long long classified = 0, recovered = 0;
    double worst = 1;
    for (long long t = 0; t < trials; ++t) {
      Rng s = base.split(std::uint64_t(t));
      HsOracle o;
      const auto key = o.issue(n, s);
      const auto inst = polys_generate(key, cfg.m, cfg.noise, s);
      const auto res = noisy_poly_attack(inst, hs_mint(key), s);
      const bool c = res.p_noisy == inst.noisy_p && res.q_noisy == inst.noisy_q;
      classified += c;
      recovered += c && res.basis && *res.basis == key.subspace;
      worst = std::min(worst, res.min_fidelity);
    }
    r.add(proportion("classification_correct", classified, trials));
    r.add(proportion("basis_recovered", recovered, trials));
    r.add(exact("min_note_fidelity", worst));
    r.require(worst >= 1 - 1e-4, "note fidelity stayed above 1 - 1e-4");
  } else if (cfg.kind == "secred") {
    const int n = detail::or_default(cfg.n, 6);
    const long long trials = detail::or_default(cfg.trials, 10000LL);
    Rng s = base.split(0);
    const auto key = hs_keygen(n, s);
    const auto inst = polys_generate(key, std::max(cfg.m, 2 * n), 0.0, s);
    const auto res = sec_reduction_forge(inst, perfect_cloner, static_cast<int>(trials), s);
    const auto spans = std::count(res.bases.begin(), res.bases.end(), key.subspace);
    r.add(proportion("postselect_rate", res.successes, trials));
    r.add(exact("expected", std::pow(2.0, -n / 2.0)));
    r.add(proportion("basis_spans", spans, res.successes));
  } else {
    throw std::invalid_argument("attack: --kind must be bomb, adaptive, noisy or secred");
  }
  return r;
}

// ---- algorithms -----------------------------------------------------------------

inline ExperimentReport run_simon(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 8);
  const long long trials = detail::or_default(cfg.trials, 100LL);
  const Rng base(cfg.seed);
  long long found = 0, orth_violations = 0;
  std::vector<double> rounds;
  for (long long t = 0; t < trials; ++t) {
    Rng s = base.split(std::uint64_t(t));
    VecF2 secret(n);
    while (secret.is_zero()) secret = VecF2::random(n, s);
    const auto inst = make_simon_two_to_one(secret, s);
    const auto res = simon_run(inst, s);
    found += res.secret && *res.secret == secret;
    for (const auto& z : res.samples) orth_violations += dot(z, secret) != 0;
    rounds.push_back(res.rounds);
  }
  r.add(proportion("secret_recovered", found, trials));
  r.add(exact("median_rounds", detail::median(rounds)));
  r.add(mean_of("rounds", rounds));
  r.add(exact("orthogonality_violations", double(orth_violations)));
  r.require(orth_violations == 0, "every sample is orthogonal to the secret");
  return r;
}

inline ExperimentReport run_grover(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 8);
  const long long trials = detail::or_default(cfg.trials, 1000LL);
  const std::size_t N = dim_of(n);
  const auto M = static_cast<std::size_t>(std::max(1, cfg.marked));
  if (M > N) throw std::invalid_argument("grover: --marked exceeds 2^n");
  Rng rng(cfg.seed);
  std::vector<std::size_t> items(N);
  std::iota(items.begin(), items.end(), std::size_t{0});
  for (std::size_t i = N; i > 1; --i) std::swap(items[i - 1], items[rng.below(i)]);
  std::vector<std::uint64_t> table(N, 0);
  for (std::size_t i = 0; i < M; ++i) table[items[i]] = 1;
  const BooleanOracle o(n, 1, table);
  const int k = cfg.k >= 0 ? cfg.k : grover_iterations(N, M);
  const auto s = grover_state(o, k);
  double p = 0;
  for (std::size_t x = 0; x < N; ++x)
    if (table[x]) p += std::norm(s[x]);
  const double closed = grover_success_probability(N, M, k);
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) hits += qmoney::detail::grover_attempt(o, k, rng).has_value();
  r.add(exact("iterations", k));
  r.add(exact("success_probability", p));
  r.add(exact("closed_form", closed));
  r.add(proportion("sampled_success", hits, trials));
  r.require(std::abs(p - closed) <= 1e-9, "simulated success matches sin^2((2k+1) theta)");
  return r;
}

// ---- hidden subspace ------------------------------------------------------------

inline ExperimentReport run_hs(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 8);
  const long long trials = detail::or_default(cfg.trials, 20LL);
  const Rng base(cfg.seed);
  double legit_err = 0, random_err = 0;
  long long forged_pass = 0;
  std::vector<double> queries;
  for (long long t = 0; t < trials; ++t) {
    Rng s = base.split(std::uint64_t(t));
    HsOracle o;
    const auto key = o.issue(n, s);
    const auto note = hs_mint(key);
    legit_err = std::max(legit_err, std::abs(hs_accept_probability(o, key.serial, note.state) - 1));
    const auto T = random_subspace(n, n / 2, s);
    const double formula = std::pow(2.0, 2 * intersect(key.subspace, T).dim() - n);
    random_err = std::max(random_err, std::abs(hs_accept_probability(o, key.serial, subspace_state(T)) - formula));
    HsOracle fresh;
    fresh.enroll(key);
    const auto f = grover_forge(fresh, key.serial, s);
    queries.push_back(double(f.queries));
    forged_pass += hs_verify(fresh, key.serial, f.note.state, s).accepted;
  }
  r.add(exact("legit_accept_error", legit_err));
  r.add(exact("random_subspace_error", random_err));
  r.add(mean_of("forge_queries", queries));
  r.add(proportion("forged_pass", forged_pass, trials));
  r.require(legit_err <= 1e-9, "legitimate notes accepted with probability 1");
  r.require(random_err <= 1e-9, "random subspace acceptance is |S cap T|^2 / 2^n");
  return r;
}

inline ExperimentReport run_hh(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 3);
  Rng rng(cfg.seed);
  const int m = n + 1;
  std::vector<std::uint64_t> perm(dim_of(m));
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  const std::vector<std::uint64_t> tf(perm.begin(), perm.begin() + long(dim_of(n)));
  std::vector<std::uint64_t> tg;
  HhMode mode;
  if (cfg.mode == "equal") {
    mode = HhMode::equal_ranges;
    tg = tf;
    for (std::size_t i = tg.size(); i > 1; --i) std::swap(tg[i - 1], tg[rng.below(i)]);
  } else if (cfg.mode == "disjoint") {
    mode = HhMode::disjoint_ranges;
    tg.assign(perm.begin() + long(dim_of(n)), perm.end());
  } else {
    throw std::invalid_argument("hh: --mode must be equal or disjoint");
  }
  const auto rep = hh_decode_demo(BooleanOracle(n, m, tf), BooleanOracle(n, m, tg), mode, rng,
                                  static_cast<int>(detail::or_default(cfg.trials, 2000LL)));
  r.add(exact("fidelity_before", rep.fidelity_before));
  if (mode == HhMode::equal_ranges) {
    r.add(exact("fidelity_after", rep.fidelity_after));
    r.require(std::abs(rep.fidelity_after - 1) <= 1e-9, "decoded pair is a Bell pair");
  } else {
    r.add(exact("best_random", rep.best_random));
    r.add(exact("exact_optimum", rep.certificate_bound));
    r.add(exact("block_offdiag_norm", rep.block_offdiag_norm));
    r.require(rep.best_random <= 0.5 + 1e-9 && rep.certificate_bound <= 0.5 + 1e-9, "separable bound 1/2 holds");
  }
  return r;
}

inline ExperimentReport run_clonopt(const ExperimentConfig& cfg) {
  ExperimentReport r;
  const int n = detail::or_default(cfg.n, 1);
  const long long trials = detail::or_default(cfg.trials, 100000LL);
  const Rng base(cfg.seed);
  Rng opt = base.split(~std::uint64_t{0});
  const auto o = optimize_clone_channel(cfg.iters, opt);
  r.add(exact("value", o.value));
  r.add(exact("iterations", o.iterations));
  r.add(exact("psd_residual", o.psd_residual));
  r.add(exact("trace_residual", o.trace_residual));
  r.add(both_pass("both_pass", trials, base, [n](Rng b) { return make_wiesner_bank(n, BankMode::strict, b); },
                  [&](const Banknote& note, Rng& s) { return optimal_counterfeit(note, o.channel, s); }));
  r.add(exact("expected", std::pow(0.75, n)));
  r.require(o.psd_residual <= 1e-9 && o.trace_residual <= 1e-9, "optimized Choi matrix is a channel");
  return r;
}

}  // namespace qmoney::lab
