#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qmoney/wiesner.hpp"

namespace qmoney {

/// Channel from one qubit to two, stored as its 8x8 Choi matrix
/// J = sum_{i,j} |i><j| (x) Phi(|i><j|), row index in*4 + out.
class CloneChannel {
 public:
  explicit CloneChannel(CMat choi) : choi_(std::move(choi)) {
    if (choi_.rows() != 8 || choi_.cols() != 8) throw std::invalid_argument("CloneChannel: Choi matrix must be 8x8");
    if (!is_hermitian(choi_, 1e-9)) throw std::invalid_argument("CloneChannel: Choi matrix not Hermitian");
    if (hermitian_eig(choi_).values.minCoeff() < -1e-9) throw std::invalid_argument("CloneChannel: Choi matrix not PSD");
    if ((output_trace(choi_) - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-8)
      throw std::invalid_argument("CloneChannel: not trace preserving");
  }

  const CMat& choi() const { return choi_; }

  /// Tr_out J; the identity for a trace-preserving channel.
  static CMat output_trace(const CMat& j) {
    CMat t(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) t(a, b) = j.block(4 * a, 4 * b, 4, 4).trace();
    return t;
  }

  /// Kraus operators (4x2): K(o, i) = sqrt(lambda) v[i*4 + o] per eigenpair.
  std::vector<CMat> kraus() const {
    const auto e = hermitian_eig(choi_);
    std::vector<CMat> ks;
    for (Eigen::Index k = 7; k >= 0; --k) {
      const double lam = e.values[k];
      if (lam <= 1e-12) continue;
      CMat K(4, 2);
      for (int o = 0; o < 4; ++o)
        for (int i = 0; i < 2; ++i) K(o, i) = std::sqrt(lam) * e.vectors(i * 4 + o, k);
      ks.push_back(std::move(K));
    }
    return ks;
  }

  /// Phi(rho) for a 2x2 input.
  CMat apply(const CMat& rho) const {
    CMat out = CMat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out += rho(i, j) * choi_.block(4 * i, 4 * j, 4, 4);
    return out;
  }

 private:
  CMat choi_;
};

/// Q = 1/4 sum_theta |theta><theta|^T (x) |theta theta><theta theta| over the
/// four BB84 states. Tr(J Q) is the average probability that both output
/// qubits pass the bank's measurement of theta.
inline CMat clone_objective_matrix() {
  CMat q = CMat::Zero(8, 8);
  for (int t = 0; t < 4; ++t) {
    const CVec v = bb84_vector(static_cast<Bb84>(t));
    const CMat p = v * v.adjoint();
    q += 0.25 * kron(CMat(p.transpose()), kron(p, p));
  }
  return q;
}

inline double clone_objective(const CMat& choi) { return (choi * clone_objective_matrix()).trace().real(); }

/// Choi matrix of rho -> rho (x) second: the first output is the input, the
/// second a fixed state.
inline CMat copy_and_append_choi(const CMat& second) {
  CMat j = CMat::Zero(8, 8);
  for (int i = 0; i < 2; ++i)
    for (int k = 0; k < 2; ++k) j.block(4 * i, 4 * k, 4, 4) = kron(CMat(CVec::Unit(2, i) * CVec::Unit(2, k).transpose()), second);
  return j;
}

/// Choi matrix of the replacement channel rho -> Tr(rho) sigma.
inline CMat replacement_choi(const CMat& sigma) { return kron(CMat::Identity(2, 2), sigma); }

namespace detail {

inline CMat project_psd(const CMat& j) {
  const auto e = hermitian_eig(j);
  const RVec lam = e.values.cwiseMax(0.0);
  return e.vectors * lam.cast<cplx>().asDiagonal() * e.vectors.adjoint();
}

/// Orthogonal projection onto {Tr_out J = I}.
inline CMat project_trace(const CMat& j) {
  const CMat d = CloneChannel::output_trace(j) - CMat::Identity(2, 2);
  return j - kron(d, CMat::Identity(4, 4)) / 4.0;
}

/// Dykstra alternation between the PSD cone and the affine trace set, then a
/// congruence (T^{-1/2} (x) I) J (T^{-1/2} (x) I) that makes Tr_out exact while
/// keeping J PSD.
inline CMat project_choi(const CMat& start, int max_rounds = 500) {
  CMat x = start, p = CMat::Zero(8, 8), q = CMat::Zero(8, 8);
  for (int r = 0; r < max_rounds; ++r) {
    const CMat y = project_psd(x + p);
    p = x + p - y;
    const CMat x2 = project_trace(y + q);
    q = y + q - x2;
    const double step = (x2 - x).norm();
    x = x2;
    if (step < 1e-13) break;
  }
  x = project_psd(x);
  const CMat t = CloneChannel::output_trace(x);
  const auto e = hermitian_eig(t);
  const RVec inv_sqrt = e.values.cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  const CMat s = e.vectors * inv_sqrt.cast<cplx>().asDiagonal() * e.vectors.adjoint();
  const CMat c = kron(s, CMat::Identity(4, 4));
  x = c * x * c.adjoint();
  return 0.5 * (x + x.adjoint());
}

}  // namespace detail

struct CloneOptimization {
  double value = 0;
  CloneChannel channel;
  int iterations = 0;               ///< ascent steps attempted
  int accepted = 0;                 ///< steps that did not decrease the value
  std::vector<double> history;      ///< value after each accepted step
  double psd_residual = 0;          ///< max(0, -lambda_min(J))
  double trace_residual = 0;        ///< max |Tr_out J - I|
};

/// Projected gradient ascent of Tr(J Q) over the Choi set {J >= 0, Tr_out J = I}.
/// The gradient is Q itself; a step that lowers the value is rejected and the
/// step size halved. The start is the completely depolarizing channel plus a
/// small random PSD perturbation drawn from `rng`.
inline CloneOptimization optimize_clone_channel(int iters, Rng& rng) {
  if (iters < 1) throw std::invalid_argument("optimize_clone_channel: iters must be positive");
  const CMat q = clone_objective_matrix();
  CMat g = CMat::Zero(8, 8);
  for (Eigen::Index r = 0; r < 8; ++r)
    for (Eigen::Index c = 0; c < 8; ++c) g(r, c) = cplx(rng.normal(), rng.normal());
  CMat j = detail::project_choi(CMat::Identity(8, 8) / 4.0 + 1e-3 * g * g.adjoint());
  double val = clone_objective(j);
  CloneOptimization out{val, CloneChannel(j), 0, 0, {}, 0, 0};
  out.history.push_back(val);
  double eta = 1.0;
  for (int k = 0; k < iters && eta > 1e-12; ++k) {
    ++out.iterations;
    const CMat cand = detail::project_choi(j + eta * q);
    const double v = clone_objective(cand);
    if (v >= val) {
      j = cand;
      val = v;
      ++out.accepted;
      out.history.push_back(val);
    } else {
      eta /= 2;
    }
  }
  out.value = clone_objective(j);
  out.channel = CloneChannel(j);
  out.psd_residual = std::max(0.0, -hermitian_eig(j).values.minCoeff());
  out.trace_residual = (CloneChannel::output_trace(j) - CMat::Identity(2, 2)).cwiseAbs().maxCoeff();
  return out;
}

/// Both-pass probability of the channel on one BB84 qubit, exactly.
inline double clone_pass_probability(const CloneChannel& ch, Bb84 theta) {
  const CVec v = bb84_vector(theta);
  const CMat p = v * v.adjoint();
  return (ch.apply(p) * kron(p, p)).trace().real();
}

}  // namespace qmoney
