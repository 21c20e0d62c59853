#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qmoney/circuit.hpp"

namespace qmoney {

/// Circuit taking |0^n> to `target`.
///
/// Qubit k is rotated by angle atan2(||alpha_{x1}||, ||alpha_{x0}||) under
/// control of each prefix x of length k, where ||alpha_y|| is the norm of the
/// amplitudes starting with y. Zero-probability prefixes get no gate. A final
/// diagonal gate multiplies basis state x by alpha_x / |alpha_x|.
inline Circuit prepare_state_recursive(const CVec& target) {
  const int n = log2_exact(static_cast<std::size_t>(target.size()));
  if (n < 1 || n > 12) throw std::invalid_argument("prepare_state_recursive: need 2^n amplitudes with 1 <= n <= 12");
  if (std::abs(target.squaredNorm() - 1.0) > kNormTol)
    throw std::invalid_argument("prepare_state_recursive: target not normalized");

  // mass[k][x]: probability of prefix x of length k.
  std::vector<std::vector<double>> mass(static_cast<std::size_t>(n + 1));
  mass[static_cast<std::size_t>(n)].resize(dim_of(n));
  for (std::size_t x = 0; x < dim_of(n); ++x) mass[static_cast<std::size_t>(n)][x] = std::norm(target[static_cast<Eigen::Index>(x)]);
  for (int k = n - 1; k >= 0; --k) {
    auto& m = mass[static_cast<std::size_t>(k)];
    const auto& next = mass[static_cast<std::size_t>(k + 1)];
    m.assign(std::size_t{1} << k, 0.0);
    for (std::size_t x = 0; x < m.size(); ++x) m[x] = next[2 * x] + next[2 * x + 1];
  }

  Circuit c(n);
  for (int k = 0; k < n; ++k) {
    const auto& m = mass[static_cast<std::size_t>(k)];
    const auto& next = mass[static_cast<std::size_t>(k + 1)];
    for (std::size_t x = 0; x < m.size(); ++x) {
      if (m[x] <= 0) continue;
      const double angle = std::atan2(std::sqrt(next[2 * x + 1]), std::sqrt(next[2 * x]));
      if (angle == 0) continue;
      Gate g = Gate::dense(gates::rot(angle), {k});
      for (int j = 0; j < k; ++j) g = g.with_control(j, static_cast<int>((x >> (k - 1 - j)) & 1));
      c.add(std::move(g));
    }
  }

  CVec phases(target.size());
  bool trivial = true;
  for (Eigen::Index x = 0; x < target.size(); ++x) {
    const double a = std::abs(target[x]);
    phases[x] = a > 0 ? target[x] / a : cplx(1);
    if (std::abs(phases[x] - cplx(1)) > 1e-15) trivial = false;
  }
  if (!trivial) c.add(Gate::phases(std::move(phases), qubit_range(0, n)));
  return c;
}

/// Circuit on n + 1 qubits taking |0^{n+1}> to |0> (alpha|psi> + beta|phi>),
/// where |psi> = c_psi|0^n>, |phi> = c_phi|0^n> are orthogonal. Qubit 0 is the
/// ancilla. Steps: rotate the ancilla to alpha|0> + beta|1>; apply c_psi or
/// c_phi controlled on it; apply c_psi^-1; flip the ancilla unless the system
/// is |0^n>; apply c_psi.
inline Circuit superpose_orthogonal(const Circuit& c_psi, const Circuit& c_phi, cplx alpha, cplx beta) {
  if (c_psi.n() != c_phi.n()) throw std::invalid_argument("superpose_orthogonal: register widths differ");
  if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > kNormTol)
    throw std::invalid_argument("superpose_orthogonal: |alpha|^2 + |beta|^2 != 1");
  const int n = c_psi.n();
  if (n + 1 > kMaxQubits) throw std::length_error("superpose_orthogonal: capacity exceeded");
  const PureState psi = c_psi.run(), phi = c_phi.run();
  if (std::abs(inner_product(psi, phi)) > 1e-9) throw std::invalid_argument("superpose_orthogonal: states not orthogonal");

  Circuit c(n + 1);
  c.add(gates::from2(alpha, -std::conj(beta), beta, std::conj(alpha)), {0});
  c.append(c_psi, 1, {{0, 0}});
  c.append(c_phi, 1, {{0, 1}});
  c.append(c_psi.inverse(), 1);
  c.add(gates::X(), {0});
  Gate or_flip = Gate::dense(gates::X(), {0});
  for (int q = 1; q <= n; ++q) or_flip = or_flip.with_control(q, 0);
  c.add(std::move(or_flip));
  c.append(c_psi, 1);
  return c;
}

}  // namespace qmoney
