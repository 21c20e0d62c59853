#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmoney/bomb.hpp"
#include "qmoney/clone.hpp"

namespace qmoney {

// Counterfeiters see the note and, for the interactive attacks, a bank
// handle. They never read the bank's description source.

/// Measures every qubit in the Z basis and emits the outcome string twice
/// under the original serial.
inline NoteBundle naive_counterfeit(const Banknote& note, Rng& rng) {
  const int n = note.state.n();
  ProductState in = ProductState::from_pure(note.state);
  ProductState out(2 * n);
  const CMat& z = bb84_basis(Bb84::zero);
  for (int q = 0; q < n; ++q) {
    if (in.measure(q, z, rng) == 1) {
      out.apply(q, gates::X().mat());
      out.apply(n + q, gates::X().mat());
    }
  }
  return {n, {note.serial, note.serial}, std::move(out)};
}

namespace detail {

/// Applies one sampled Kraus operator (4x2) of a 1 -> 2 qubit channel to local
/// qubit `pos` of a k-qubit vector. The result has k+1 qubits, the two outputs
/// at positions pos and pos+1.
inline CVec kraus_expand(const CVec& amps, int k, int pos, const std::vector<CMat>& kraus, Rng& rng) {
  const std::size_t low = dim_of(k - 1 - pos);  // qubits after pos
  const std::size_t high = dim_of(pos);         // qubits before pos
  std::vector<CVec> outs;
  std::vector<double> weights;
  for (const auto& K : kraus) {
    CVec o = CVec::Zero(static_cast<Eigen::Index>(dim_of(k + 1)));
    for (std::size_t h = 0; h < high; ++h)
      for (std::size_t l = 0; l < low; ++l) {
        const cplx a0 = amps[static_cast<Eigen::Index>((h * 2 + 0) * low + l)];
        const cplx a1 = amps[static_cast<Eigen::Index>((h * 2 + 1) * low + l)];
        for (std::size_t r = 0; r < 4; ++r)
          o[static_cast<Eigen::Index>((h * 4 + r) * low + l)] = K(static_cast<Eigen::Index>(r), 0) * a0 + K(static_cast<Eigen::Index>(r), 1) * a1;
      }
    weights.push_back(o.squaredNorm());
    outs.push_back(std::move(o));
  }
  const std::size_t pick = sample_index(weights, rng);
  return outs[pick] / std::sqrt(weights[pick]);
}

}  // namespace detail

/// Applies the channel to every qubit of the note independently. Output qubit
/// pair (i, n+i) carries the two copies of input qubit i and may be entangled.
/// Each Kraus branch is sampled (quantum trajectories), so the returned bundle
/// is one pure sample of the mixed output.
inline NoteBundle optimal_counterfeit(const Banknote& note, const CloneChannel& ch, Rng& rng) {
  const int n = note.state.n();
  const auto kraus = ch.kraus();
  const ProductState in = ProductState::from_pure(note.state);
  ProductState out(2 * n);
  for (const auto& f : in.factors()) {
    // Output qubit list: each input qubit q becomes (q, n + q) in place.
    std::vector<int> qs;
    CVec amps = f.amps;
    int k = static_cast<int>(f.qubits.size());
    for (std::size_t j = 0; j < f.qubits.size(); ++j) {
      const int pos = static_cast<int>(qs.size());
      amps = detail::kraus_expand(amps, k, pos, kraus, rng);
      ++k;
      qs.push_back(f.qubits[j]);
      qs.push_back(n + f.qubits[j]);
    }
    out.replace(std::move(qs), std::move(amps));
  }
  return {n, {note.serial, note.serial}, std::move(out)};
}

class QueryBudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64 n ceil(log2(n+1)).
inline std::uint64_t adaptive_query_budget(int n) {
  return 64ULL * static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(std::ceil(std::log2(n + 1.0)));
}

struct AdaptiveResult {
  BasisString recovered;
  std::uint64_t queries = 0;
};

/// Learns the note one qubit at a time against a bank that hands notes back
/// after failed verifications. Qubit i is set aside and the four BB84 states
/// are substituted in turn; a candidate is eliminated at its first rejection.
/// The true state is never rejected, so the loop ends once one candidate is
/// left. The other qubits are measured in their own bases and never disturbed.
template <class Source>
AdaptiveResult adaptive_attack(Bank<Source>& bank, const Banknote& note, Rng& rng) {
  if (bank.mode() != BankMode::naive_return) throw std::invalid_argument("adaptive_attack: needs a naive_return bank");
  const int n = note.state.n();
  if (n + 1 > kMaxQubits) throw std::length_error("adaptive_attack: capacity exceeded");
  const std::uint64_t budget = adaptive_query_budget(n);
  // Qubits 0..n-1 hold the note; qubit n is the substitute.
  const int total = n + 1;
  CVec amps = kron(note.state.amps(), bb84_vector(Bb84::zero));
  DenseHost host{amps, total};
  const int sub[] = {n};
  std::vector<Bb84> found(static_cast<std::size_t>(n), Bb84::zero);
  AdaptiveResult res;
  for (int i = 0; i < n; ++i) {
    std::vector<int> qs = qubit_range(0, n);
    qs[static_cast<std::size_t>(i)] = n;
    bool alive[4] = {true, true, true, true};
    int remaining = 4;
    for (int c = 0; remaining > 1; c = (c + 1) % 4) {
      if (!alive[c]) continue;
      // Discard whatever the bank left in the substitute slot and prepare candidate c.
      if (measure_inplace(amps, total, sub, rng) == 1) apply_matrix_inplace(amps, total, gates::X().mat(), sub);
      CMat prep(2, 2);
      prep.col(0) = bb84_vector(static_cast<Bb84>(c));
      prep.col(1) = bb84_vector(static_cast<Bb84>(c ^ 1));
      apply_matrix_inplace(amps, total, prep, sub);
      if (res.queries >= budget) throw QueryBudgetExceeded("adaptive_attack: query budget " + std::to_string(budget) + " exceeded");
      ++res.queries;
      if (!bank.verify_in_place(note.serial, host, qs, rng)) {
        alive[c] = false;
        --remaining;
      }
    }
    for (int c = 0; c < 4; ++c)
      if (alive[c]) found[static_cast<std::size_t>(i)] = static_cast<Bb84>(c);
  }
  res.recovered = BasisString(std::move(found));
  return res;
}

struct BombAttackResult {
  BasisString recovered;
  bool caught = false;              ///< the bank rejected at least one submission
  std::uint64_t catches = 0;        ///< number of rejected submissions
  std::uint64_t verifications = 0;
};

/// Reflection 2|theta><theta| - I; it fixes |theta> and flips the orthogonal state.
inline CMat bb84_reflection(Bb84 b) {
  const CVec v = bb84_vector(b);
  return 2.0 * v * v.adjoint() - CMat::Identity(2, 2);
}

/// Interaction-free learning against a bank that logs failures. For qubit i
/// and candidate theta: a control qubit starts at |0>; each of K =
/// ceil(pi/(2 eps)) rounds rotates it by pi/(2K) and applies the controlled
/// reflection about theta to the money qubit, then submits the note. If the
/// qubit is theta the reflection does nothing and the control reaches |1>;
/// otherwise it either kicks back a sign (control oscillates near |0>) or
/// entangles, and the bank's measurement pins the control at |0>. Candidates
/// +, -, 0 are tried in order; 1 is inferred when none fires.
///
/// A rejection destroys the note in a real strict bank. For statistics the
/// simulation continues on the collapsed state and reports the catch.
template <class B>
BombAttackResult bomb_attack(B& bank, const Banknote& note, double epsilon, Rng& rng) {
  if (!(epsilon > 0 && epsilon <= 0.05)) throw std::invalid_argument("bomb_attack: epsilon must be in (0, 0.05]");
  const int n = note.state.n();
  if (n + 1 > kMaxQubits) throw std::length_error("bomb_attack: capacity exceeded");
  const int K = ev_rounds(epsilon);
  const CMat rot = gates::rot(std::numbers::pi / (2.0 * K)).mat();
  const int total = n + 1;  // qubit n is the control
  CVec amps = kron(note.state.amps(), bb84_vector(Bb84::zero));
  DenseHost host{amps, total};
  const auto qs = qubit_range(0, n);
  const int ctrl[] = {n};
  const int ctrl_value[] = {1};
  BombAttackResult res;
  std::vector<Bb84> found(static_cast<std::size_t>(n), Bb84::one);
  const Bb84 order[] = {Bb84::plus, Bb84::minus, Bb84::zero};
  for (int i = 0; i < n; ++i) {
    const int money[] = {i};
    for (Bb84 cand : order) {
      const CMat refl = bb84_reflection(cand);
      for (int r = 0; r < K; ++r) {
        apply_matrix_inplace(amps, total, rot, ctrl);
        apply_matrix_inplace(amps, total, refl, money, ctrl, ctrl_value);
        ++res.verifications;
        if (!bank.verify_in_place(note.serial, host, qs, rng)) ++res.catches;
      }
      if (measure_inplace(amps, total, ctrl, rng) == 1) {
        apply_matrix_inplace(amps, total, gates::X().mat(), ctrl);  // reset the control
        found[static_cast<std::size_t>(i)] = cand;
        break;
      }
    }
  }
  res.caught = res.catches > 0;
  res.recovered = BasisString(std::move(found));
  return res;
}

}  // namespace qmoney
