#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmoney/density.hpp"

namespace qmoney {

/// Two-outcome measurement implemented as: append d' ancillas in |0>, apply U,
/// project with {Pi0, I - Pi0}. Ancillas follow the system qubits.
struct GentleMeasurement {
  int ancilla_qubits;
  Unitary u;
  CMat pi0;

  GentleMeasurement(int d, Unitary unitary, CMat projector)
      : ancilla_qubits(d), u(std::move(unitary)), pi0(std::move(projector)) {
    if (d < 0) throw std::invalid_argument("GentleMeasurement: negative ancilla count");
    if (pi0.rows() != pi0.cols() || static_cast<std::size_t>(pi0.rows()) != u.dim())
      throw std::invalid_argument("GentleMeasurement: projector and unitary dimensions differ");
    if (!is_hermitian(pi0, kUnitaryTol)) throw std::invalid_argument("GentleMeasurement: Pi0 not Hermitian");
    if ((pi0 * pi0 - pi0).cwiseAbs().maxCoeff() > kUnitaryTol)
      throw std::invalid_argument("GentleMeasurement: Pi0 not idempotent");
  }

  int total_qubits() const { return u.qubits(); }
};

struct GentleOutcome {
  double p0;
  DensityMatrix rho_tilde;
};

namespace detail {

inline CMat with_zero_ancillas(const CMat& rho, int d) {
  const auto a = static_cast<Eigen::Index>(dim_of(d));
  CMat anc = CMat::Zero(a, a);
  anc(0, 0) = 1;
  return d == 0 ? rho : kron(rho, anc);
}

/// Traces out the trailing `d` qubits.
inline CMat trace_trailing(const CMat& m, int d) {
  const auto a = static_cast<Eigen::Index>(dim_of(d));
  const Eigen::Index s = m.rows() / a;
  CMat out = CMat::Zero(s, s);
  for (Eigen::Index i = 0; i < s; ++i)
    for (Eigen::Index j = 0; j < s; ++j)
      for (Eigen::Index t = 0; t < a; ++t) out(i, j) += m(i * a + t, j * a + t);
  return out;
}

}  // namespace detail

/// p0 = Tr[Pi0 sigma] with sigma = U(rho (x) |0><0|)U^dagger, and
/// rho_tilde = Tr_anc U^dagger (Pi0 sigma Pi0 + Pi1 sigma Pi1) U.
inline GentleOutcome gentle_measure(const DensityMatrix& rho, const GentleMeasurement& m) {
  if (rho.n() + m.ancilla_qubits != m.total_qubits())
    throw std::invalid_argument("gentle_measure: register size mismatch");
  const CMat& U = m.u.mat();
  const CMat sigma = U * detail::with_zero_ancillas(rho.mat(), m.ancilla_qubits) * U.adjoint();
  const CMat pi1 = CMat::Identity(m.pi0.rows(), m.pi0.cols()) - m.pi0;
  const double p0 = std::clamp((m.pi0 * sigma).trace().real(), 0.0, 1.0);
  const CMat dephased = m.pi0 * sigma * m.pi0 + pi1 * sigma * pi1;
  CMat back = detail::trace_trailing(U.adjoint() * dephased * U, m.ancilla_qubits);
  return {p0, DensityMatrix::trusted(rho.n(), 0.5 * (back + back.adjoint()))};
}

struct SequentialOutcome {
  DensityMatrix rho_out;
  std::vector<double> p0_on_original;  ///< p0 of each measurement evaluated on the input state
  bool precondition_met;               ///< every p0_on_original >= 1 - epsilon
};

/// Applies the measurements in order, each undone after dephasing. The
/// precondition is evaluated against the original state and reported.
inline SequentialOutcome sequential_gentle(const DensityMatrix& rho, const std::vector<GentleMeasurement>& ms,
                                           double epsilon) {
  SequentialOutcome r{rho, {}, true};
  for (const auto& m : ms) {
    const double p0 = gentle_measure(rho, m).p0;
    r.p0_on_original.push_back(p0);
    if (p0 < 1.0 - epsilon - kEigTol) r.precondition_met = false;
    r.rho_out = gentle_measure(r.rho_out, m).rho_tilde;
  }
  return r;
}

/// Random measurement whose Pi1 carries weight exactly `epsilon` on the
/// given state. U is Haar-random on n + d' qubits; Pi1 is spanned by whole
/// eigenvectors of sigma plus one vector mixing a partial eigenvector with
/// the kernel of sigma. Needs d' >= 1 so that kernel exists.
inline GentleMeasurement random_gentle_measurement(const DensityMatrix& rho, int d, double epsilon, Rng& rng) {
  if (d < 1) throw std::invalid_argument("random_gentle_measurement: need at least one ancilla");
  if (!(epsilon >= 0 && epsilon < 1)) throw std::invalid_argument("random_gentle_measurement: epsilon out of range");
  const int total = rho.n() + d;
  Unitary u = Unitary::random(total, rng);
  const CMat sigma = u.mat() * detail::with_zero_ancillas(rho.mat(), d) * u.mat().adjoint();
  const auto e = hermitian_eig(sigma);
  const auto D = e.values.size();

  std::vector<Eigen::Index> support, kernel;
  for (Eigen::Index i = 0; i < D; ++i) (e.values[i] > 1e-12 ? support : kernel).push_back(i);
  // Random visiting order keeps the measurement generic.
  for (std::size_t i = support.size(); i > 1; --i) std::swap(support[i - 1], support[rng.below(i)]);
  for (std::size_t i = kernel.size(); i > 1; --i) std::swap(kernel[i - 1], kernel[rng.below(i)]);

  CMat pi1 = CMat::Zero(D, D);
  double remaining = epsilon;
  std::size_t used_kernel = 0;
  for (Eigen::Index idx : support) {
    const double lam = e.values[idx];
    if (lam <= remaining) {
      pi1 += e.vectors.col(idx) * e.vectors.col(idx).adjoint();
      remaining -= lam;
      continue;
    }
    if (remaining > 0) {
      // <w|sigma|w> = c^2 lam = remaining.
      const double c = std::sqrt(remaining / lam);
      const double s = std::sqrt(1 - c * c);
      const CVec w = c * e.vectors.col(idx) + s * e.vectors.col(kernel.at(used_kernel++));
      pi1 += w * w.adjoint();
      remaining = 0;
    }
    break;
  }
  // Occasionally pad Pi1 with kernel directions; they carry no weight.
  while (used_kernel < kernel.size() && rng.bernoulli(0.3)) {
    const CVec k = e.vectors.col(kernel[used_kernel++]);
    pi1 += k * k.adjoint();
  }
  const CMat pi0 = CMat::Identity(D, D) - pi1;
  return GentleMeasurement(d, std::move(u), 0.5 * (pi0 + pi0.adjoint()));
}

}  // namespace qmoney
