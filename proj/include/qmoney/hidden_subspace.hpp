#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmoney/f2.hpp"
#include "qmoney/grover.hpp"
#include "qmoney/wiesner.hpp"

namespace qmoney {

inline constexpr int kMaxHsQubits = 16;

/// Secret of one hidden-subspace note: S of dimension n/2, its dual, and the
/// public handle under which the oracle answers membership queries.
struct HsKey {
  int n = 0;
  SubspaceF2 subspace;
  SubspaceF2 dual;
  std::uint64_t serial = 0;
};

inline void check_hs_width(int n) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("hidden subspace: n must be even and at least 2");
  if (n > kMaxHsQubits) throw std::length_error("hidden subspace: n exceeds " + std::to_string(kMaxHsQubits));
}

/// Random S of dimension n/2 under a random 64-bit handle.
inline HsKey hs_keygen(int n, Rng& rng) {
  check_hs_width(n);
  HsKey k;
  k.n = n;
  k.subspace = random_subspace(n, n / 2, rng);
  k.dual = qmoney::dual(k.subspace);
  k.serial = rng.next_u64();
  return k;
}

/// Uniform superposition over the elements of s: amplitude 2^{-dim/2} on each.
inline PureState subspace_state(const SubspaceF2& s) {
  check_qubits(s.n(), "subspace_state");
  CVec a = CVec::Zero(static_cast<Eigen::Index>(dim_of(s.n())));
  const double amp = std::pow(2.0, -0.5 * s.dim());
  for (const auto& v : s.elements()) a[static_cast<Eigen::Index>(v.to_index())] = amp;
  return PureState(s.n(), std::move(a));
}

inline Banknote hs_mint(const HsKey& key) { return {key.serial, subspace_state(key.subspace)}; }

/// Normalized H on every qubit (fast Walsh-Hadamard transform).
inline void hadamard_all_inplace(CVec& x) {
  const auto d = x.size();
  for (Eigen::Index h = 1; h < d; h <<= 1)
    for (Eigen::Index i = 0; i < d; i += 2 * h)
      for (Eigen::Index j = i; j < i + h; ++j) {
        const cplx a = x[j], b = x[j + h];
        x[j] = a + b;
        x[j + h] = a - b;
      }
  x /= std::sqrt(static_cast<double>(d));
}

/// Membership oracles chi_S and chi_{S-perp} behind opaque handles. Every
/// call that a party makes through `query` or `project` is counted; `peek`
/// is the uncounted lookup used only to build instances. One oracle per
/// thread of control.
class HsOracle {
 public:
  enum class Which { subspace, dual };

  /// Registers the key; a handle already in use is rejected.
  void enroll(const HsKey& key) {
    check_hs_width(key.n);
    if (key.subspace.dim() != key.n / 2 || key.dual != qmoney::dual(key.subspace))
      throw std::invalid_argument("HsOracle::enroll: key is not a dimension n/2 subspace with its dual");
    if (entries_.count(key.serial)) throw std::invalid_argument("HsOracle::enroll: serial already registered");
    Entry e;
    e.n = key.n;
    e.in_s.resize(dim_of(key.n));
    e.in_dual.resize(dim_of(key.n));
    for (std::size_t x = 0; x < dim_of(key.n); ++x) {
      const VecF2 v = VecF2::from_index(key.n, x);
      e.in_s[x] = key.subspace.contains(v);
      e.in_dual[x] = key.dual.contains(v);
    }
    entries_.emplace(key.serial, std::move(e));
  }

  /// Draws a fresh key and registers it.
  HsKey issue(int n, Rng& rng) {
    for (;;) {
      HsKey k = hs_keygen(n, rng);
      if (entries_.count(k.serial)) continue;
      enroll(k);
      return k;
    }
  }

  bool registered(std::uint64_t serial) const { return entries_.count(serial) != 0; }
  int n(std::uint64_t serial) const { return entry(serial).n; }

  /// Counted classical query.
  bool query(std::uint64_t serial, Which w, std::size_t x) {
    Entry& e = entry(serial);
    bump(e, w);
    return table(e, w).at(x);
  }

  /// One counted quantum query: projects amps onto the span of basis states
  /// in the set (or outside it when `keep_members` is false).
  void project(std::uint64_t serial, Which w, CVec& amps, bool keep_members = true) {
    Entry& e = entry(serial);
    if (amps.size() != static_cast<Eigen::Index>(dim_of(e.n))) throw std::invalid_argument("HsOracle::project: width mismatch");
    bump(e, w);
    const auto& t = table(e, w);
    for (Eigen::Index i = 0; i < amps.size(); ++i)
      if (t[static_cast<std::size_t>(i)] != keep_members) amps[i] = 0;
  }

  /// Uncounted lookup for instance construction.
  bool peek(std::uint64_t serial, Which w, std::size_t x) const { return table(entry(serial), w).at(x); }

  std::uint64_t queries(std::uint64_t serial, Which w) const {
    const Entry& e = entry(serial);
    return w == Which::subspace ? e.s_queries : e.dual_queries;
  }

  /// Credits quantum queries made inside a simulated circuit.
  void note_queries(std::uint64_t serial, Which w, std::uint64_t count) {
    Entry& e = entry(serial);
    (w == Which::subspace ? e.s_queries : e.dual_queries) += count;
  }

 private:
  struct Entry {
    int n = 0;
    std::vector<bool> in_s, in_dual;
    std::uint64_t s_queries = 0, dual_queries = 0;
  };

  Entry& entry(std::uint64_t serial) {
    auto it = entries_.find(serial);
    if (it == entries_.end()) throw UnknownSerial("HsOracle: unknown serial " + std::to_string(serial));
    return it->second;
  }
  const Entry& entry(std::uint64_t serial) const {
    auto it = entries_.find(serial);
    if (it == entries_.end()) throw UnknownSerial("HsOracle: unknown serial " + std::to_string(serial));
    return it->second;
  }
  static const std::vector<bool>& table(const Entry& e, Which w) { return w == Which::subspace ? e.in_s : e.in_dual; }
  static void bump(Entry& e, Which w) { ++(w == Which::subspace ? e.s_queries : e.dual_queries); }

  std::map<std::uint64_t, Entry> entries_;
};

/// Accepting branch H P_dual H P_S applied to amps (unnormalized). Its squared
/// norm is the acceptance probability; the branch equals |S><S| on amps.
/// Costs one query to each oracle.
inline CVec hs_accept_branch(HsOracle& oracle, std::uint64_t serial, CVec amps) {
  oracle.project(serial, HsOracle::Which::subspace, amps);
  hadamard_all_inplace(amps);
  oracle.project(serial, HsOracle::Which::dual, amps);
  hadamard_all_inplace(amps);
  return amps;
}

inline double hs_accept_probability(HsOracle& oracle, std::uint64_t serial, const PureState& s) {
  return hs_accept_branch(oracle, serial, s.amps()).squaredNorm();
}

struct HsVerifyResult {
  bool accepted = false;
  PureState state;  ///< post-measurement state
};

/// Measures membership in S, Hadamards every qubit, measures membership in
/// S-perp, Hadamards back. Both measurements always run, so each call costs
/// exactly one query to each oracle; acceptance needs both to pass.
inline HsVerifyResult hs_verify(HsOracle& oracle, std::uint64_t serial, const PureState& s, Rng& rng) {
  if (s.n() != oracle.n(serial)) throw std::invalid_argument("hs_verify: note width does not match the key");
  CVec x = s.amps();
  bool pass = true;
  const auto check = [&](HsOracle::Which w) {
    CVec in = x;
    oracle.project(serial, w, in);
    const double p = std::clamp(in.squaredNorm(), 0.0, 1.0);
    if (rng.uniform() < p) {
      x = in / std::sqrt(p);
    } else {
      x -= in;
      x /= x.norm();
      pass = false;
    }
  };
  check(HsOracle::Which::subspace);
  hadamard_all_inplace(x);
  check(HsOracle::Which::dual);
  hadamard_all_inplace(x);
  return {pass, PureState(s.n(), x / x.norm())};
}

class IterationBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GroverForgeResult {
  Banknote note;
  SubspaceF2 basis;
  std::uint64_t queries = 0;   ///< chi_S queries, quantum and classical
  int searches = 0;            ///< Grover runs, including failed ones
};

/// Counterfeits with no note in hand: n/2 times, Grover-searches chi_S for an
/// element of S outside the span found so far, then mints |span>. The number
/// of marked items 2^{n/2} - 2^k is known, so each run uses the optimal
/// iterate count and one classical query to check the measured string.
inline GroverForgeResult grover_forge(HsOracle& oracle, std::uint64_t serial, Rng& rng, int max_searches = 0) {
  const int n = oracle.n(serial);
  const int h = n / 2;
  if (max_searches <= 0) max_searches = 64 * h;
  GroverForgeResult r{{serial, PureState::zero(n)}, SubspaceF2(n), 0, 0};
  const std::uint64_t before = oracle.queries(serial, HsOracle::Which::subspace);
  SubspaceF2 found(n);
  while (found.dim() < h) {
    // The forger's circuit: chi_S then a classical span test on the same input.
    const SubspaceF2 span = found;
    const BooleanOracle mark = BooleanOracle::from_function(n, 1, [&](std::uint64_t x) {
      return oracle.peek(serial, HsOracle::Which::subspace, x) && !span.contains(VecF2::from_index(n, x));
    });
    const std::size_t marked = dim_of(h) - dim_of(found.dim());
    if (r.searches >= max_searches)
      throw IterationBudgetExceeded("grover_forge: no basis after " + std::to_string(max_searches) + " searches");
    ++r.searches;
    const int k = grover_iterations(dim_of(n), marked);
    CVec x = grover_state(mark, k).amps();
    oracle.note_queries(serial, HsOracle::Which::subspace, static_cast<std::uint64_t>(k));
    const auto reg = qubit_range(0, n);
    const std::uint64_t y = measure_inplace(x, n, reg, rng);
    if (oracle.query(serial, HsOracle::Which::subspace, y)) found.insert(VecF2::from_index(n, y));
  }
  r.queries = oracle.queries(serial, HsOracle::Which::subspace) - before;
  r.basis = found;
  r.note = {serial, subspace_state(found)};
  return r;
}

}  // namespace qmoney
