#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmoney/amplify.hpp"
#include "qmoney/polynomial.hpp"

namespace qmoney {

/// A procedure that turns one note state into `copies` copies. The security
/// reduction assumes one exists; the simulator's stand-in is perfect_cloner.
using Cloner = std::function<std::vector<PureState>(const PureState&, int copies)>;

/// Reduction scaffolding only: copies the amplitudes, which no physical
/// process can do for an unknown state.
inline std::vector<PureState> perfect_cloner(const PureState& s, int copies) {
  return std::vector<PureState>(static_cast<std::size_t>(copies), s);
}

struct SecReductionResult {
  int trials = 0;
  int successes = 0;                 ///< runs whose postselection succeeded
  std::vector<SubspaceF2> bases;     ///< one per success: span of the measured copies
  double rate() const { return trials ? double(successes) / trials : 0.0; }
};

/// The security reduction run forwards: prepare the uniform superposition,
/// evaluate every p_i into an ancilla and postselect on all zeros. The common
/// zero set is S, so success has probability 2^{-n/2} and leaves |S>. The
/// cloner then supplies 2n copies, each is measured, and the outcomes are row
/// reduced.
inline SecReductionResult sec_reduction_forge(const PolyInstance& inst, const Cloner& cloner, int trials, Rng& rng) {
  if (inst.noisy_count != 0) throw std::invalid_argument("sec_reduction_forge: needs a noiseless instance");
  if (!cloner) throw std::invalid_argument("sec_reduction_forge: no cloner supplied");
  if (trials < 1) throw std::invalid_argument("sec_reduction_forge: trials must be positive");
  const int n = inst.n;
  const int copies = 2 * n;
  const auto zeros = common_zeros(n, inst.ps, std::vector<bool>(inst.ps.size(), true));
  const auto reg = qubit_range(0, n);
  SecReductionResult r;
  r.trials = trials;
  for (int t = 0; t < trials; ++t) {
    CVec x = PureState::plus(n).amps();
    CVec kept = x;
    for (Eigen::Index i = 0; i < kept.size(); ++i)
      if (!zeros[static_cast<std::size_t>(i)]) kept[i] = 0;
    const double p = kept.squaredNorm();
    if (!(rng.uniform() < p)) continue;
    ++r.successes;
    const PureState collapsed(n, kept / std::sqrt(p));
    std::vector<VecF2> samples;
    for (const auto& c : cloner(collapsed, copies)) {
      CVec a = c.amps();
      samples.push_back(VecF2::from_index(n, measure_inplace(a, n, reg, rng)));
    }
    r.bases.push_back(SubspaceF2::span(n, samples));
  }
  return r;
}

namespace detail {

/// Points on which at least `need` of the polynomials vanish.
inline std::vector<bool> vote_superset(int n, const std::vector<Poly3F2>& ps, int need) {
  std::vector<bool> c(dim_of(n), false);
  for (std::size_t x = 0; x < c.size(); ++x) {
    const auto bits = VecF2::from_index(n, x).bits();
    int zeros = 0;
    for (const auto& p : ps) zeros += p.eval_bits(bits) == 0;
    c[x] = zeros >= need;
  }
  return c;
}

/// Depth-first search for a dimension-h subspace A inside cp whose dual lies
/// inside cq. Basis vectors are taken in increasing index order.
inline std::optional<SubspaceF2> find_subspace(int n, int h, const std::vector<bool>& cp, const std::vector<bool>& cq) {
  std::vector<std::size_t> cand;
  for (std::size_t x = 1; x < cp.size(); ++x)
    if (cp[x]) cand.push_back(x);
  std::optional<SubspaceF2> hit;
  const auto inside = [&](const SubspaceF2& s, const std::vector<bool>& set) {
    for (const auto& v : s.elements())
      if (!set[v.to_index()]) return false;
    return true;
  };
  std::function<void(const SubspaceF2&, std::size_t)> rec = [&](const SubspaceF2& s, std::size_t from) {
    if (hit) return;
    if (s.dim() == h) {
      if (inside(dual(s), cq)) hit = s;
      return;
    }
    for (std::size_t k = from; k < cand.size() && !hit; ++k) {
      SubspaceF2 t = s;
      if (!t.insert(VecF2::from_index(n, cand[k]))) continue;
      if (inside(t, cp)) rec(t, k + 1);
    }
  };
  rec(SubspaceF2(n), 0);
  return hit;
}

}  // namespace detail

struct NoisyAttackResult {
  std::vector<bool> p_noisy, q_noisy;  ///< classification of each polynomial
  std::optional<SubspaceF2> basis;     ///< empty when the genuine p's do not cut out an n/2-dim subspace
  SubspaceF2 reflection_subspace;      ///< the subspace whose state drives the restore step
  double min_fidelity = 1;             ///< worst |<note|state>|^2 after any restore
  long restore_iterations = 0;
  PureState note;                      ///< the note after the attack
};

class AmbiguousInstance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-copy tomography on a noisy instance. The attacker first builds the
/// reflection target: C_p holds the points where all but the publicly known
/// number of noisy p's vanish (a superset of S), C_q likewise for S-perp, and
/// the unique n/2-dimensional A in C_p with A-perp in C_q names the state to
/// reflect about. Each polynomial is then measured on the note `rounds`
/// times; q's are measured after H on every qubit. After every measurement the
/// note is pulled back to |A> by measure_and_restore. A polynomial is genuine
/// iff all its outcomes are 0. Finally the common zeros of the genuine p's are
/// row reduced (brute force over 2^n).
inline NoisyAttackResult noisy_poly_attack(const PolyInstance& inst, const Banknote& note, Rng& rng, int rounds = 25) {
  const int n = inst.n;
  if (note.state.n() != n) throw std::invalid_argument("noisy_poly_attack: note width does not match the instance");
  if (n > 12) throw std::length_error("noisy_poly_attack: brute force limited to n <= 12");
  if (rounds < 1) throw std::invalid_argument("noisy_poly_attack: rounds must be positive");
  const int h = n / 2;
  const auto cp = detail::vote_superset(n, inst.ps, static_cast<int>(inst.ps.size()) - inst.noisy_count);
  const auto cq = detail::vote_superset(n, inst.qs, static_cast<int>(inst.qs.size()) - inst.noisy_count);
  const auto a = detail::find_subspace(n, h, cp, cq);
  if (!a) throw AmbiguousInstance("noisy_poly_attack: no n/2-dimensional subspace fits the vote");
  const CVec target_vec = subspace_state(*a).amps();
  const LinearMap target = [&](CVec& x) { x = target_vec * target_vec.dot(x); };

  NoisyAttackResult r{{}, {}, std::nullopt, *a, 1.0, 0, note.state};
  const auto probe = [&](const Poly3F2& p, bool dual_side) {
    const LinearMap zero_proj = [&](CVec& x) {
      if (dual_side) hadamard_all_inplace(x);
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (p.eval_bits(VecF2::from_index(n, static_cast<std::size_t>(i)).bits())) x[i] = 0;
      if (dual_side) hadamard_all_inplace(x);
    };
    bool noisy = false;
    for (int k = 0; k < rounds; ++k) {
      const auto res = measure_and_restore(r.note, zero_proj, target, rng);
      noisy |= res.outcome == 1;
      r.restore_iterations += res.iterations;
      r.note = res.state;
      r.min_fidelity = std::min(r.min_fidelity, std::norm(note.state.amps().dot(r.note.amps())));
    }
    return noisy;
  };
  for (const auto& p : inst.ps) r.p_noisy.push_back(probe(p, false));
  for (const auto& q : inst.qs) r.q_noisy.push_back(probe(q, true));

  std::vector<bool> genuine(r.p_noisy.size());
  for (std::size_t i = 0; i < genuine.size(); ++i) genuine[i] = !r.p_noisy[i];
  const auto z = common_zeros(n, inst.ps, genuine);
  std::vector<VecF2> pts;
  for (std::size_t x = 0; x < z.size(); ++x)
    if (z[x]) pts.push_back(VecF2::from_index(n, x));
  const SubspaceF2 span = SubspaceF2::span(n, pts);
  if (span.dim() == h && pts.size() == dim_of(h)) r.basis = span;
  return r;
}

}  // namespace qmoney
