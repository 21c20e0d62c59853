#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmoney/amplify.hpp"
#include "qmoney/bomb.hpp"
#include "qmoney/grover.hpp"
#include "qmoney/hh.hpp"
#include "qmoney/simon.hpp"
#include "qmoney/state_prep.hpp"

using namespace qmoney;

namespace {

BooleanOracle marked_oracle(int n, std::vector<std::uint64_t> marked) {
  std::vector<std::uint64_t> t(dim_of(n), 0);
  for (auto m : marked) t[m] = 1;
  return BooleanOracle(n, 1, t);
}

}  // namespace

// ---- oracles ---------------------------------------------------------------

TEST(Oracle, XorOfIdentityCopiesInput) {
  const auto id = BooleanOracle::from_function(3, 3, [](std::uint64_t x) { return x; });
  const auto in = qubit_range(0, 3), out = qubit_range(3, 3);
  for (std::uint64_t x = 0; x < 8; ++x) {
    const auto s = apply_xor_oracle(PureState::basis(6, x << 3), id, in, out);
    EXPECT_NEAR(std::abs(s[(x << 3) | x] - 1.0), 0, 1e-15);
  }
  EXPECT_EQ(id.quantum_queries(), 8u);
}

TEST(Oracle, HadamardConjugatedXorIsPhaseOracle) {
  Rng rng(3);
  const auto f = BooleanOracle::from_function(3, 2, [&](std::uint64_t) { return rng.below(4); });
  const auto in = qubit_range(0, 3), out = qubit_range(3, 2);
  for (int t = 0; t < 20; ++t) {
    const auto s = PureState::random(5, rng);
    auto a = s;
    for (int q : out) a = apply_unitary(a, gates::H(), {q});
    a = apply_xor_oracle(a, f, in, out);
    for (int q : out) a = apply_unitary(a, gates::H(), {q});
    const auto b = apply_phase_oracle(s, f, in, out);
    EXPECT_LT((a.amps() - b.amps()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Oracle, ConstantZeroPhaseOracleIsIdentity) {
  Rng rng(5);
  const BooleanOracle zero(3, 1, std::vector<std::uint64_t>(8, 0));
  const auto s = PureState::random(3, rng);
  EXPECT_LT((apply_phase_oracle(s, zero, qubit_range(0, 3)).amps() - s.amps()).norm(), 1e-15);
}

TEST(Oracle, RejectsOverlappingRegisters) {
  const auto id = BooleanOracle::from_function(2, 2, [](std::uint64_t x) { return x; });
  const int in[] = {0, 1}, out[] = {1, 2};
  EXPECT_THROW(apply_xor_oracle(PureState::zero(4), id, in, out), std::invalid_argument);
}

TEST(Oracle, TruthTableTextRoundTrip) {
  Rng rng(7);
  const auto f = BooleanOracle::from_function(4, 3, [&](std::uint64_t) { return rng.below(8); });
  std::istringstream in(format_truth_table(f));
  EXPECT_EQ(parse_truth_table(in).table(), f.table());
  std::istringstream bad("01\n1\n");
  EXPECT_THROW(parse_truth_table(bad), std::invalid_argument);
}

// ---- Simon -----------------------------------------------------------------

TEST(Simon, RecoversSmallSecret) {
  Rng rng(11);
  const auto s = VecF2::parse("110");
  const auto inst = make_simon_two_to_one(s, rng);
  ASSERT_EQ(*inst.secret(), s);
  for (int t = 0; t < 20; ++t) {
    const auto r = simon_run(inst, rng);
    ASSERT_TRUE(r.secret.has_value());
    EXPECT_EQ(*r.secret, s);
    for (const auto& z : r.samples) EXPECT_EQ(dot(z, s), 0);
  }
}

TEST(Simon, OneQueryPerRound) {
  Rng rng(12);
  const auto inst = make_simon_two_to_one(VecF2::parse("1011"), rng);
  inst.oracle().reset_counters();
  const auto r = simon_run(inst, rng);
  EXPECT_EQ(inst.oracle().quantum_queries(), static_cast<std::uint64_t>(r.rounds));
  EXPECT_EQ(inst.oracle().classical_queries(), 2u);
}

TEST(Simon, DeclaresOneToOne) {
  Rng rng(13);
  for (int t = 0; t < 20; ++t) {
    const auto inst = make_simon_one_to_one(5, rng);
    EXPECT_FALSE(inst.secret().has_value());
    EXPECT_FALSE(simon_run(inst, rng).secret.has_value());
  }
}

TEST(Simon, RejectsBrokenPromise) {
  std::vector<std::uint64_t> t{0, 0, 0, 1, 2, 3, 4, 5};
  EXPECT_THROW(SimonInstance(BooleanOracle(3, 3, t)), std::invalid_argument);
}

TEST(Simon, EightBitMedianRounds) {
  Rng rng(17);
  std::vector<int> rounds;
  for (int t = 0; t < 100; ++t) {
    Rng r = rng.split(static_cast<std::uint64_t>(t));
    VecF2 s(8);
    while (s.is_zero()) s = VecF2::random(8, r);
    const auto inst = make_simon_two_to_one(s, r);
    const auto out = simon_run(inst, r);
    ASSERT_TRUE(out.secret.has_value());
    ASSERT_EQ(*out.secret, s);
    for (const auto& z : out.samples) ASSERT_EQ(dot(z, s), 0);
    rounds.push_back(out.rounds);
  }
  std::nth_element(rounds.begin(), rounds.begin() + 50, rounds.end());
  EXPECT_LE(rounds[50], 32);
}

// ---- Grover and amplitude amplification ------------------------------------

TEST(Grover, FourItemsOneIterationIsExact) {
  const auto o = marked_oracle(2, {2});
  const auto s = grover_state(o, 1);
  EXPECT_NEAR(std::norm(s[2]), 1.0, 1e-9);
  EXPECT_EQ(grover_iterations(4, 1), 1);
}

TEST(Grover, TwoFiftySixItemsTwelveIterations) {
  const auto o = marked_oracle(8, {77});
  EXPECT_EQ(grover_iterations(256, 1), 12);
  const double p = std::norm(grover_state(o, 12)[77]);
  // sin^2(25 asin(1/16)), evaluated independently.
  EXPECT_NEAR(p, 0.9999470421032736, 1e-9);
  EXPECT_GE(p, 0.99);
}

TEST(Grover, AllMarkedNeedsNoIterations) {
  Rng rng(19);
  const auto o = marked_oracle(3, {0, 1, 2, 3, 4, 5, 6, 7});
  const auto r = grover_search(o, rng, 8);
  EXPECT_EQ(r.iterations, 0);
  ASSERT_TRUE(r.index.has_value());
}

TEST(Grover, ClosedFormForAllSmallInstances) {
  for (int n = 1; n <= 6; ++n) {
    const std::size_t N = dim_of(n);
    for (std::size_t M = 1; M <= N; ++M) {
      std::vector<std::uint64_t> marked;
      for (std::size_t i = 0; i < M; ++i) marked.push_back((i * 37 + 5) % N);
      std::sort(marked.begin(), marked.end());
      marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
      if (marked.size() != M) continue;
      const auto o = marked_oracle(n, marked);
      for (int k = 0; k <= 4; ++k) {
        const auto s = grover_state(o, k);
        double p = 0;
        for (auto mk : marked) p += std::norm(s[mk]);
        ASSERT_NEAR(p, grover_success_probability(N, M, k), 1e-9) << "N=" << N << " M=" << M << " k=" << k;
      }
    }
  }
}

TEST(Grover, SearchFindsMarkedItem) {
  Rng rng(23);
  const auto o = marked_oracle(6, {41});
  int hits = 0;
  for (int t = 0; t < 200; ++t) hits += grover_search(o, rng, 1).index == std::optional<std::uint64_t>(41);
  EXPECT_GE(hits, 190);
  int unknown = 0;
  for (int t = 0; t < 50; ++t) unknown += grover_search(o, rng).index.has_value();
  EXPECT_EQ(unknown, 50);
}

TEST(Grover, NoMarkedItemIsReported) {
  Rng rng(29);
  const auto o = marked_oracle(5, {});
  const auto r = grover_search(o, rng);
  EXPECT_FALSE(r.index.has_value());
  EXPECT_GT(r.iterations, 12 * 5);
}

TEST(AmplitudeAmplify, SixtyDegreeRotationHitsTarget) {
  // <v|w> = sin(pi/6); one iterate rotates by 2 * pi/6.
  CVec w = CVec::Zero(4), v = CVec::Zero(4);
  w[0] = 1;
  v[0] = std::sin(std::numbers::pi / 6);
  v[3] = std::cos(std::numbers::pi / 6);
  const PureState vs(2, v), ws(2, w);
  const auto out = amplitude_amplify(vs, reflection_about(vs), reflection_about(ws), 1);
  EXPECT_NEAR(std::abs(inner_product(ws, out)), 1.0, 1e-9);
  const auto same = amplitude_amplify(vs, reflection_about(vs), reflection_about(ws), 0);
  EXPECT_LT((same.amps() - v).norm(), 1e-15);
}

TEST(AmplitudeAmplify, StaysInTwoDimensionalSpan) {
  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const auto v = PureState::random(4, rng), w = PureState::random(4, rng);
    CVec x = v.amps();
    // Orthonormal basis of span{v, w}.
    CVec e2 = w.amps() - v.amps().dot(w.amps()) * v.amps();
    e2 /= e2.norm();
    const auto rv = reflection_about(v), rw = reflection_about(w);
    for (int k = 0; k < 10; ++k) {
      x = amplitude_amplify(PureState(4, x), rv, rw, 1).amps();
      const CVec resid = x - v.amps() * v.amps().dot(x) - e2 * e2.dot(x);
      ASSERT_LT(resid.norm(), 1e-9);
    }
  }
}

TEST(AmplitudeAmplify, MatchesGroverTrajectory) {
  const int n = 5;
  const std::uint64_t target = 19;
  const auto o = marked_oracle(n, {target});
  const auto plus = PureState::plus(n);
  const auto rv = reflection_about(plus), rw = reflection_about(PureState::basis(n, target));
  for (int k = 0; k <= 6; ++k) {
    const auto a = amplitude_amplify(plus, rv, rw, k);
    const auto g = grover_state(o, k);
    EXPECT_LT((a.amps() - g.amps()).norm(), 1e-12) << k;
  }
}

TEST(ExactAmplification, ReachesTargetForAnyOverlap) {
  for (double sb : {0.05, 0.1, 0.3, 0.5, 0.7071, 0.9, 0.999}) {
    const auto plan = exact_amplification(sb);
    CVec x(2), t(2);
    x << sb, std::sqrt(1 - sb * sb);
    const CVec start = x;
    const LinearMap pt = [](CVec& v) { v[1] = 0; };
    const LinearMap ps = [start](CVec& v) { v = start * start.dot(v); };
    for (int i = 0; i < plan.iterations; ++i) {
      phase_reflect(x, pt, plan.phase);
      phase_reflect(x, ps, plan.phase);
      x = -x;
    }
    EXPECT_NEAR(std::norm(x[0]), 1.0, 1e-12) << sb;
  }
}

TEST(MeasureAndRestore, CommutingProjectorIsFree) {
  Rng rng(37);
  const auto s = PureState::basis(3, 5);
  const LinearMap pi = [](CVec& v) { v[5] *= 1.0; };
  const auto target_vec = s.amps();
  const LinearMap target = [target_vec](CVec& v) { v = target_vec * target_vec.dot(v); };
  const auto r = measure_and_restore(s, pi, target, rng);
  EXPECT_EQ(r.outcome, 0);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_NEAR(r.fidelity, 1, 1e-15);
}

TEST(MeasureAndRestore, RepeatedRoundsKeepFidelity) {
  Rng rng(41);
  // |S> for S = span{e0, e1, e2} in F2^6, measured by random diagonal projectors.
  CVec v = CVec::Zero(64);
  for (std::size_t x = 0; x < 64; ++x)
    if ((x & 7) == 0) v[static_cast<Eigen::Index>(x)] = 1;
  const PureState s = PureState::normalized(v);
  const CVec sv = s.amps();
  const LinearMap target = [sv](CVec& u) { u = sv * sv.dot(u); };
  PureState cur = s;
  for (int round = 0; round < 50; ++round) {
    std::vector<bool> keep(64);
    for (auto&& k : keep) k = rng.bernoulli(0.5);
    const LinearMap pi = [keep](CVec& u) {
      for (Eigen::Index i = 0; i < u.size(); ++i)
        if (!keep[static_cast<std::size_t>(i)]) u[i] = 0;
    };
    const auto r = measure_and_restore(cur, pi, target, rng);
    ASSERT_GE(std::norm(inner_product(s, r.state)), 1 - 1e-6);
    cur = r.state;
  }
  EXPECT_GE(std::norm(inner_product(s, cur)), 1 - 1e-4);
}

TEST(MeasureAndRestore, WrongTargetStalls) {
  Rng rng(43);
  const auto s = PureState::plus(2);
  const CVec wrong = PureState::basis(2, 0).amps();
  const LinearMap target = [wrong](CVec& u) { u = wrong * wrong.dot(u); };
  const LinearMap pi = [](CVec& u) { u[1] = u[2] = u[3] = 0; };
  EXPECT_THROW(
      {
        for (int i = 0; i < 50; ++i) measure_and_restore(s, pi, target, rng);
      },
      RestoreStall);
}

// ---- state preparation -----------------------------------------------------

TEST(StatePrep, BasisOne) {
  CVec t(2);
  t << 0, 1;
  const auto c = prepare_state_recursive(t);
  EXPECT_EQ(c.size(), 1u);
  EXPECT_NEAR(std::abs(c.run()[1] - 1.0), 0, 1e-12);
}

TEST(StatePrep, UniformIsPlusCubed) {
  const auto c = prepare_state_recursive(PureState::plus(3).amps());
  EXPECT_LT((c.run().amps() - PureState::plus(3).amps()).norm(), 1e-9);
}

TEST(StatePrep, RandomTargetsReproduced) {
  Rng rng(47);
  for (int t = 0; t < 100; ++t) {
    CVec target = PureState::random(3, rng).amps();
    if (t % 5 == 0) target[static_cast<Eigen::Index>(rng.below(8))] = 0;  // exercise skipped branches
    target /= target.norm();
    const auto c = prepare_state_recursive(target);
    ASSERT_LT((c.run().amps() - target).norm(), 1e-9);
  }
}

TEST(SuperposeOrthogonal, TrivialWeights) {
  Rng rng(53);
  const auto cpsi = prepare_state_recursive(PureState::basis(2, 1).amps());
  const auto cphi = prepare_state_recursive(PureState::basis(2, 2).amps());
  const auto out = superpose_orthogonal(cpsi, cphi, 1, 0).run();
  EXPECT_NEAR(std::abs(out[1] - 1.0), 0, 1e-9);
}

TEST(SuperposeOrthogonal, BellPair) {
  const auto c00 = Circuit(2);
  const auto c11 = prepare_state_recursive(PureState::basis(2, 3).amps());
  const double r = 1 / std::numbers::sqrt2;
  const auto out = superpose_orthogonal(c00, c11, r, r).run();
  EXPECT_NEAR(std::abs(out[0] - r), 0, 1e-9);
  EXPECT_NEAR(std::abs(out[3] - r), 0, 1e-9);
  EXPECT_NEAR(out.amps().tail(4).norm(), 0, 1e-9);
}

TEST(SuperposeOrthogonal, RandomOrthogonalPairs) {
  Rng rng(59);
  for (int t = 0; t < 100; ++t) {
    const CVec a = PureState::random(3, rng).amps();
    CVec b = PureState::random(3, rng).amps();
    b -= a.dot(b) * a;
    b /= b.norm();
    const cplx alpha = std::polar(std::cos(rng.uniform() * 1.5), rng.uniform() * 6.28);
    const cplx beta = std::polar(std::sqrt(1 - std::norm(alpha)), rng.uniform() * 6.28);
    const auto out = superpose_orthogonal(prepare_state_recursive(a), prepare_state_recursive(b), alpha, beta).run();
    const CVec want = alpha * a + beta * b;
    ASSERT_LT((out.amps().head(8) - want).norm(), 1e-9);
    ASSERT_LT(out.amps().tail(8).norm(), 1e-9);
  }
}

TEST(SuperposeOrthogonal, RejectsOverlap) {
  const auto c = prepare_state_recursive(PureState::plus(2).amps());
  EXPECT_THROW(superpose_orthogonal(c, Circuit(2), 0.6, 0.8), std::invalid_argument);
}

// ---- Elitzur-Vaidman -------------------------------------------------------

TEST(BombTest, DudNeverExplodes) {
  Rng rng(61);
  for (double eps : {0.1, 0.05, 0.01}) {
    for (int i = 0; i < 500; ++i) {
      const auto r = ev_bomb_test(Package::dud, eps, rng);
      ASSERT_EQ(r.verdict, BombVerdict::no_bomb);
      ASSERT_FALSE(r.exploded);
    }
  }
}

TEST(BombTest, SurvivingBombAlwaysDetected) {
  Rng rng(67);
  int exploded = 0;
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    const auto r = ev_bomb_test(Package::bomb, 0.05, rng);
    if (r.exploded) ++exploded;
    else ASSERT_EQ(r.verdict, BombVerdict::bomb);
  }
  const double p = ev_explosion_probability(0.05);
  EXPECT_NEAR(double(exploded) / trials, p, 3 * std::sqrt(p * (1 - p) / trials));
}

// ---- Harlow-Hayden ---------------------------------------------------------

TEST(HarlowHayden, EqualRangesDecodeToBellPair) {
  Rng rng(71);
  std::vector<std::uint64_t> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
  std::vector<std::uint64_t> tf(perm.begin(), perm.begin() + 8), tg(tf);
  for (std::size_t i = tg.size(); i > 1; --i) std::swap(tg[i - 1], tg[rng.below(i)]);
  const auto rep = hh_decode_demo(BooleanOracle(3, 4, tf), BooleanOracle(3, 4, tg), HhMode::equal_ranges, rng);
  EXPECT_NEAR(rep.fidelity_after, 1.0, 1e-9);
  EXPECT_LT(rep.fidelity_before, 1.0);
}

TEST(HarlowHayden, IdentityNeedsNoDecoding) {
  Rng rng(73);
  const auto id = BooleanOracle::from_function(3, 3, [](std::uint64_t x) { return x; });
  const auto rep = hh_decode_demo(id, id, HhMode::equal_ranges, rng);
  EXPECT_TRUE(rep.permutation_is_identity);
  EXPECT_NEAR(rep.fidelity_before, 1.0, 1e-9);
  EXPECT_NEAR(rep.fidelity_after, 1.0, 1e-9);
}

TEST(HarlowHayden, DisjointRangesCapAtOneHalf) {
  Rng rng(79);
  const auto f = BooleanOracle::from_function(3, 4, [](std::uint64_t x) { return x; });
  const auto g = BooleanOracle::from_function(3, 4, [](std::uint64_t x) { return 15 - x; });
  const auto rep = hh_decode_demo(f, g, HhMode::disjoint_ranges, rng, 2000);
  EXPECT_LE(rep.best_random, 0.5 + 1e-9);
  EXPECT_NEAR(rep.block_offdiag_norm, 0, 1e-12);
  EXPECT_NEAR(rep.certificate_bound, 0.5, 1e-9);
}

TEST(HarlowHayden, ModeMustMatchOracles) {
  Rng rng(83);
  const auto f = BooleanOracle::from_function(2, 3, [](std::uint64_t x) { return x; });
  const auto g = BooleanOracle::from_function(2, 3, [](std::uint64_t x) { return x + 4; });
  EXPECT_THROW(hh_decode_demo(f, g, HhMode::equal_ranges, rng), std::invalid_argument);
  EXPECT_THROW(hh_decode_demo(f, f, HhMode::disjoint_ranges, rng), std::invalid_argument);
  const BooleanOracle bad(2, 3, {0, 0, 1, 2});
  EXPECT_THROW(hh_decode_demo(bad, bad, HhMode::equal_ranges, rng), std::invalid_argument);
}
