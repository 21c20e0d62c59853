#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "qmoney/amplify.hpp"
#include "qmoney/oracle.hpp"

namespace qmoney {

/// sin^2((2k+1) theta) with theta = asin(sqrt(M/N)).
inline double grover_success_probability(std::size_t N, std::size_t M, int k) {
  if (N == 0 || M > N) throw std::invalid_argument("grover_success_probability: need 0 <= M <= N, N > 0");
  const double theta = std::asin(std::sqrt(double(M) / double(N)));
  const double s = std::sin((2 * k + 1) * theta);
  return s * s;
}

/// floor((pi/4) sqrt(N/M)); zero when every item is marked.
inline int grover_iterations(std::size_t N, std::size_t M) {
  if (M == 0 || M > N) throw std::invalid_argument("grover_iterations: need 1 <= M <= N");
  return static_cast<int>(std::floor(std::numbers::pi / 4 * std::sqrt(double(N) / double(M))));
}

/// 2|s><s| - I with |s> the uniform superposition: v -> 2 mean(v) - v.
inline void grover_diffusion(CVec& x) {
  const cplx mean = x.mean();
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 2.0 * mean - x[i];
}

/// State after k Grover iterates from |+>^n, oracle on all n qubits. k queries.
inline PureState grover_state(const BooleanOracle& o, int k) {
  if (o.n_out() != 1) throw std::invalid_argument("grover: oracle must have one output bit");
  const int n = o.n_in();
  const auto reg = qubit_range(0, n);
  CVec x = PureState::plus(n).amps();
  for (int i = 0; i < k; ++i) {
    apply_phase_oracle_inplace(x, n, o, reg);
    grover_diffusion(x);
  }
  return PureState(n, x / x.norm());
}

struct GroverResult {
  std::optional<std::uint64_t> index;  ///< a verified marked item, if found
  int iterations = 0;                  ///< total Grover iterates, equal to quantum queries
  int attempts = 0;                    ///< measure-and-check rounds
};

namespace detail {

inline std::optional<std::uint64_t> grover_attempt(const BooleanOracle& o, int k, Rng& rng) {
  CVec x = grover_state(o, k).amps();
  const auto reg = qubit_range(0, o.n_in());
  const std::uint64_t y = measure_inplace(x, o.n_in(), reg, rng);
  if (o.query(y) == 1) return y;
  return std::nullopt;
}

}  // namespace detail

/// Grover search. With `marked` known, runs floor((pi/4) sqrt(N/M)) iterates
/// once and checks the outcome classically. Otherwise runs the
/// Boyer-Brassard-Hoyer-Tapp schedule until a marked item turns up or
/// 12 sqrt(N) + 12 iterates are spent; an empty result is the failure report.
inline GroverResult grover_search(const BooleanOracle& o, Rng& rng, std::optional<std::size_t> marked = std::nullopt) {
  if (o.n_out() != 1) throw std::invalid_argument("grover_search: oracle must have one output bit");
  const std::size_t N = dim_of(o.n_in());
  GroverResult r;
  if (marked) {
    if (*marked == 0) return r;
    r.iterations = grover_iterations(N, *marked);
    r.attempts = 1;
    r.index = detail::grover_attempt(o, r.iterations, rng);
    return r;
  }
  const int budget = static_cast<int>(12 * std::sqrt(double(N))) + 12;
  double m = 1;
  const double lambda = 6.0 / 5.0;
  while (r.iterations <= budget) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(std::ceil(m))));
    ++r.attempts;
    r.iterations += j;
    if (auto y = detail::grover_attempt(o, j, rng)) {
      r.index = y;
      return r;
    }
    m = std::min(lambda * m, std::sqrt(double(N)));
  }
  return r;
}

}  // namespace qmoney
