#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qmoney/f2.hpp"
#include "qmoney/oracle.hpp"

namespace qmoney {

/// Oracle f : {0,1}^n -> {0,1}^n that is one-to-one, or two-to-one with
/// f(x) = f(y) iff y in {x, x xor s} for a fixed s != 0. The promise is checked
/// on construction. Bit strings map to VecF2 with the top bit at coordinate 0.
class SimonInstance {
 public:
  explicit SimonInstance(BooleanOracle o) : oracle_(std::move(o)) {
    if (oracle_.n_in() != oracle_.n_out()) throw std::invalid_argument("SimonInstance: n_in must equal n_out");
    const int n = oracle_.n_in();
    if (n > 10) throw std::invalid_argument("SimonInstance: n must be <= 10");
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> pre;
    for (std::uint64_t x = 0; x < dim_of(n); ++x) pre[oracle_.peek(x)].push_back(x);
    if (pre.size() == dim_of(n)) return;
    const auto& zero_class = pre.at(oracle_.peek(0));
    if (zero_class.size() != 2) throw std::invalid_argument("SimonInstance: promise violated");
    const std::uint64_t s = zero_class[1];
    for (const auto& [v, xs] : pre)
      if (xs.size() != 2 || (xs[0] ^ xs[1]) != s) throw std::invalid_argument("SimonInstance: promise violated");
    secret_ = VecF2::from_index(n, s);
  }

  int n() const { return oracle_.n_in(); }
  const BooleanOracle& oracle() const { return oracle_; }
  /// Ground truth, for tests and reports only; simon_run never reads it.
  const std::optional<VecF2>& secret() const { return secret_; }

 private:
  BooleanOracle oracle_;
  std::optional<VecF2> secret_;
};

/// Random two-to-one instance with the given secret (as a VecF2 of length n).
inline SimonInstance make_simon_two_to_one(const VecF2& s, Rng& rng) {
  const int n = s.n();
  if (s.is_zero()) throw std::invalid_argument("make_simon_two_to_one: secret must be nonzero");
  const std::uint64_t mask = s.to_index();
  std::vector<std::uint64_t> values(dim_of(n));
  std::iota(values.begin(), values.end(), 0);
  for (std::size_t i = values.size(); i > 1; --i) std::swap(values[i - 1], values[rng.below(i)]);
  std::vector<std::uint64_t> table(dim_of(n), ~std::uint64_t{0});
  std::size_t next = 0;
  for (std::uint64_t x = 0; x < dim_of(n); ++x) {
    if (table[x] != ~std::uint64_t{0}) continue;
    table[x] = table[x ^ mask] = values[next++];
  }
  return SimonInstance(BooleanOracle(n, n, std::move(table)));
}

inline SimonInstance make_simon_one_to_one(int n, Rng& rng) {
  std::vector<std::uint64_t> table(dim_of(n));
  std::iota(table.begin(), table.end(), 0);
  for (std::size_t i = table.size(); i > 1; --i) std::swap(table[i - 1], table[rng.below(i)]);
  return SimonInstance(BooleanOracle(n, n, std::move(table)));
}

struct SimonResult {
  std::optional<VecF2> secret;  ///< empty when declared one-to-one
  int rounds = 0;               ///< quantum rounds, one oracle query each
  std::vector<VecF2> samples;   ///< measured z, in order
  std::uint64_t classical_queries = 0;
};

class SimonRoundCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One quantum round: H on the input register, XOR oracle, measure the output
/// register, H on the input register, measure it.
inline VecF2 simon_sample(const SimonInstance& inst, Rng& rng) {
  const int n = inst.n();
  const int width = 2 * n;
  const auto in = qubit_range(0, n), out = qubit_range(n, n);
  CVec amps = CVec::Zero(static_cast<Eigen::Index>(dim_of(width)));
  amps[0] = 1;
  const CMat h = gates::H().mat();
  for (int q : in) apply_matrix_inplace(amps, width, h, std::span<const int>(&q, 1));
  apply_xor_oracle_inplace(amps, width, inst.oracle(), in, out);
  measure_inplace(amps, width, out, rng);
  for (int q : in) apply_matrix_inplace(amps, width, h, std::span<const int>(&q, 1));
  return VecF2::from_index(n, measure_inplace(amps, width, in, rng));
}

/// Samples z until the orthogonal system leaves at most one nonzero
/// candidate, then confirms with two classical queries f(0) and f(c).
inline SimonResult simon_run(const SimonInstance& inst, Rng& rng) {
  const int n = inst.n();
  const int cap = 50 * n;
  SimonResult r;
  for (;;) {
    if (r.rounds >= cap)
      throw SimonRoundCapExceeded("simon_run: round cap " + std::to_string(cap) + " exceeded");
    r.samples.push_back(simon_sample(inst, rng));
    ++r.rounds;
    const auto sol = solve_orthogonal(n, r.samples);
    if (sol.dim() > 1) continue;
    if (sol.dim() == 1) {
      const VecF2 c = sol.basis()[0];
      const auto before = inst.oracle().classical_queries();
      const bool equal = inst.oracle().query(0) == inst.oracle().query(c.to_index());
      r.classical_queries += inst.oracle().classical_queries() - before;
      if (equal) r.secret = c;
    }
    return r;
  }
}

}  // namespace qmoney
