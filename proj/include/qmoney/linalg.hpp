#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "qmoney/rng.hpp"

namespace qmoney {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

/// Largest register the dense simulator will allocate.
inline constexpr int kMaxQubits = 20;

inline constexpr double kNormTol = 1e-10;
inline constexpr double kUnitaryTol = 1e-9;
inline constexpr double kEigTol = 1e-9;
/// Eigenvalues in [-kClipTol, 0) are treated as numerical zero.
inline constexpr double kClipTol = 1e-10;

inline void check_qubits(int n, const char* what) {
  if (n < 1) throw std::invalid_argument(std::string(what) + ": qubit count must be >= 1");
  if (n > kMaxQubits)
    throw std::length_error(std::string(what) + ": " + std::to_string(n) + " qubits exceeds capacity " +
                            std::to_string(kMaxQubits));
}

inline std::size_t dim_of(int n) { return std::size_t{1} << n; }

/// log2 of a power of two, or -1.
inline int log2_exact(std::size_t d) {
  if (d == 0 || (d & (d - 1)) != 0) return -1;
  int k = 0;
  while ((std::size_t{1} << k) != d) ++k;
  return k;
}

/// Spectrum of a Hermitian matrix, eigenvalues ascending.
struct HermitianEig {
  RVec values;
  CMat vectors;
};

/// Hermitian eigendecomposition; the one numerical primitive behind distances,
/// square roots and purification. Input is symmetrised before solving.
inline HermitianEig hermitian_eig(const CMat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_eig: matrix not square");
  const CMat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eig: eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Clip tiny negative eigenvalues of a PSD matrix; reject anything more negative.
inline RVec clip_psd_spectrum(const RVec& vals, const char* what) {
  RVec out = vals;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (out[i] < -kClipTol)
      throw std::invalid_argument(std::string(what) + ": matrix has eigenvalue " + std::to_string(out[i]));
    if (out[i] < 0) out[i] = 0;
  }
  return out;
}

/// Principal square root of a PSD matrix.
inline CMat psd_sqrt(const CMat& m) {
  const auto e = hermitian_eig(m);
  const RVec v = clip_psd_spectrum(e.values, "psd_sqrt");
  return e.vectors * v.cwiseSqrt().asDiagonal() * e.vectors.adjoint();
}

inline bool is_hermitian(const CMat& m, double tol) {
  return m.rows() == m.cols() && (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const CMat& m, double tol = kUnitaryTol) {
  if (m.rows() != m.cols()) return false;
  const CMat d = m.adjoint() * m - CMat::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline CVec kron(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

/// Haar-random unitary via QR of a complex Ginibre matrix with phase fix.
inline CMat random_unitary_matrix(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  CMat z(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) z(i, j) = cplx(rng.normal(), rng.normal()) / std::sqrt(2.0);
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

/// Uniformly random unit vector (Haar measure on the sphere).
inline CVec random_unit_vector(std::size_t dim, Rng& rng) {
  CVec v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = cplx(rng.normal(), rng.normal());
  return v / v.norm();
}

}  // namespace qmoney
