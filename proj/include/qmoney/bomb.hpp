#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qmoney/state.hpp"

namespace qmoney {

enum class Package { bomb, dud };
enum class BombVerdict { bomb, no_bomb };

struct BombOutcome {
  BombVerdict verdict;
  bool exploded;
  int rounds;  ///< rounds actually executed
};

/// K = ceil(pi / (2 eps)) rounds; each rotates by pi/(2K) <= eps so a dud
/// lands exactly on |1>.
inline int ev_rounds(double epsilon) { return static_cast<int>(std::ceil(std::numbers::pi / (2 * epsilon))); }

/// Per-trial explosion probability for a live bomb: 1 - cos^2(pi/(2K))^K.
inline double ev_explosion_probability(double epsilon) {
  const int K = ev_rounds(epsilon);
  const double c = std::cos(std::numbers::pi / (2.0 * K));
  return 1 - std::pow(c * c, K);
}

/// Elitzur-Vaidman test. The probe qubit starts at |0> and is rotated each
/// round; a live bomb measures it, exploding on outcome 1. The final
/// measurement reads 1 for a dud and 0 for a surviving bomb.
inline BombOutcome ev_bomb_test(Package package, double epsilon, Rng& rng) {
  if (!(epsilon > 0 && epsilon <= 0.1)) throw std::invalid_argument("ev_bomb_test: epsilon must be in (0, 0.1]");
  const int K = ev_rounds(epsilon);
  const CMat r = gates::rot(std::numbers::pi / (2.0 * K)).mat();
  const int q[] = {0};
  CVec b = PureState::zero(1).amps();
  for (int i = 0; i < K; ++i) {
    apply_matrix_inplace(b, 1, r, q);
    if (package == Package::bomb && measure_inplace(b, 1, q, rng) == 1) return {BombVerdict::bomb, true, i + 1};
  }
  const bool one = measure_inplace(b, 1, q, rng) == 1;
  return {one ? BombVerdict::no_bomb : BombVerdict::bomb, false, K};
}

}  // namespace qmoney
