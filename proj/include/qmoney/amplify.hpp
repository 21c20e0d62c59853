#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qmoney/state.hpp"

namespace qmoney {

/// In-place linear map on an amplitude vector (a projector or a reflection).
using LinearMap = std::function<void(CVec&)>;

/// One iterate -U_v U_w.
inline void amplify_step(CVec& x, const LinearMap& reflect_v, const LinearMap& reflect_w) {
  reflect_w(x);
  reflect_v(x);
  x = -x;
}

/// Applies (-U_v U_w)^k to `start`. With start = |v> and <v|w> = sin t, the
/// overlap with |w> after k steps is sin((2k+1)t).
inline CVec amplitude_amplify(CVec start, const LinearMap& reflect_v, const LinearMap& reflect_w, int k) {
  for (int i = 0; i < k; ++i) amplify_step(start, reflect_v, reflect_w);
  return start;
}

inline PureState amplitude_amplify(const PureState& start, const Unitary& reflect_v, const Unitary& reflect_w, int k) {
  if (reflect_v.dim() != start.dim() || reflect_w.dim() != start.dim())
    throw std::invalid_argument("amplitude_amplify: reflection dimension mismatch");
  const LinearMap rv = [&](CVec& x) { x = reflect_v.mat() * x; };
  const LinearMap rw = [&](CVec& x) { x = reflect_w.mat() * x; };
  CVec out = amplitude_amplify(start.amps(), rv, rw, k);
  return PureState(start.n(), out / out.norm());
}

/// I - 2|v><v| as a dense unitary.
inline Unitary reflection_about(const PureState& v) {
  const auto d = static_cast<Eigen::Index>(v.dim());
  return Unitary(CMat::Identity(d, d) - 2.0 * v.amps() * v.amps().adjoint());
}

/// Phase-generalised reflection I - (1 - e^{i phi}) P for a projector P.
inline void phase_reflect(CVec& x, const LinearMap& projector, double phi) {
  CVec p = x;
  projector(p);
  x -= (1.0 - std::polar(1.0, phi)) * p;
}

struct ExactAmplification {
  int iterations;  ///< J + 1
  double phase;    ///< phi used by both reflections
};

/// Iteration count and phase for which J + 1 steps of -R_s(phi) R_t(phi) map a
/// start state with overlap sin(beta) onto the target exactly:
/// J = floor((pi/2 - beta) / (2 beta)), phi = 2 asin(sin(pi/(4J+6)) / sin(beta)).
inline ExactAmplification exact_amplification(double sin_beta) {
  if (!(sin_beta > 0 && sin_beta <= 1)) throw std::invalid_argument("exact_amplification: overlap must be in (0, 1]");
  const double beta = std::asin(std::min(1.0, sin_beta));
  const int J = static_cast<int>(std::floor((std::numbers::pi / 2 - beta) / (2 * beta)));
  const double ratio = std::sin(std::numbers::pi / (4.0 * J + 6.0)) / sin_beta;
  return {J + 1, 2 * std::asin(std::min(1.0, ratio))};
}

class RestoreStall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RestoreResult {
  int outcome;       ///< 0 for the projector, 1 for its complement
  PureState state;   ///< restored state
  int iterations;    ///< amplification steps used
  double fidelity;   ///< |<original|restored>|^2
};

/// Measures {P, I - P} on `s`, then amplifies the collapsed state back toward
/// the range of `target`. The first pass uses the outcome projector as the
/// start reflection and is exact when `target` projects onto `s`. Any further
/// pass reflects about the current state directly.
///
/// Simulator privilege: the overlap that fixes the iteration count and the
/// stopping fidelity are read from the exact amplitudes.
inline RestoreResult measure_and_restore(const PureState& s, const LinearMap& projector, const LinearMap& target,
                                         Rng& rng, double goal = 1 - 1e-6) {
  CVec in_p = s.amps();
  projector(in_p);
  const double p0 = std::clamp(in_p.squaredNorm(), 0.0, 1.0);
  const int outcome = rng.uniform() < p0 ? 0 : 1;
  CVec cur = outcome == 0 ? in_p : CVec(s.amps() - in_p);
  cur /= cur.norm();

  const LinearMap outcome_proj = [&](CVec& x) {
    CVec p = x;
    projector(p);
    if (outcome == 0) x = p;
    else x -= p;
  };
  const auto fid = [&](const CVec& x) { return std::norm(s.amps().dot(x)); };

  int iterations = 0;
  int budget = -1;
  LinearMap start = outcome_proj;
  while (fid(cur) < goal) {
    CVec t = cur;
    target(t);
    const double sin_beta = std::min(1.0, t.norm());
    if (sin_beta < 1e-12) throw RestoreStall("measure_and_restore: state has no overlap with the target");
    if (budget < 0) budget = static_cast<int>(std::ceil(10.0 / std::asin(sin_beta)));
    const auto plan = exact_amplification(sin_beta);
    if (iterations + plan.iterations > budget)
      throw RestoreStall("measure_and_restore: no convergence within " + std::to_string(budget) + " iterations");
    for (int i = 0; i < plan.iterations; ++i) {
      phase_reflect(cur, target, plan.phase);
      phase_reflect(cur, start, plan.phase);
      cur = -cur;
    }
    iterations += plan.iterations;
    cur /= cur.norm();
    const CVec snapshot = cur;
    start = [snapshot](CVec& x) { x = snapshot * snapshot.dot(x); };
  }
  return {outcome, PureState(s.n(), cur), iterations, fid(cur)};
}

}  // namespace qmoney
