#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmoney/linalg.hpp"
#include "qmoney/state.hpp"

namespace qmoney {

/// Hermitian, PSD, trace-one matrix on n qubits.
class DensityMatrix {
 public:
  DensityMatrix(int n, CMat mat) : n_(n), mat_(std::move(mat)) {
    validate_shape();
    if (!is_hermitian(mat_, kNormTol)) throw std::invalid_argument("DensityMatrix: not Hermitian");
    const auto e = hermitian_eig(mat_);
    if (e.values.minCoeff() < -kClipTol) throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }

  /// Skips the spectral check. For outputs of trace-preserving maps applied to
  /// already-valid states, where the check would cost a full diagonalisation.
  static DensityMatrix trusted(int n, CMat mat) { return DensityMatrix(n, std::move(mat), Trusted{}); }

  static DensityMatrix maximally_mixed(int n) {
    check_qubits(n, "DensityMatrix");
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    return trusted(n, CMat::Identity(d, d) / double(d));
  }
  /// Random mixed state: normalised W W^dagger with W a Ginibre matrix of the given rank.
  static DensityMatrix random(int n, Rng& rng, int rank = -1) {
    check_qubits(n, "DensityMatrix::random");
    const auto d = static_cast<Eigen::Index>(dim_of(n));
    const Eigen::Index r = rank < 1 ? d : std::min<Eigen::Index>(rank, d);
    CMat w(d, r);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < r; ++j) w(i, j) = cplx(rng.normal(), rng.normal());
    CMat m = w * w.adjoint();
    m /= m.trace().real();
    return trusted(n, 0.5 * (m + m.adjoint()));
  }

  int n() const { return n_; }
  std::size_t dim() const { return dim_of(n_); }
  const CMat& mat() const { return mat_; }

 private:
  struct Trusted {};
  DensityMatrix(int n, CMat mat, Trusted) : n_(n), mat_(std::move(mat)) { validate_shape(); }

  void validate_shape() const {
    check_qubits(n_, "DensityMatrix");
    if (static_cast<std::size_t>(mat_.rows()) != dim_of(n_) || mat_.rows() != mat_.cols())
      throw std::invalid_argument("DensityMatrix: matrix is not 2^n x 2^n");
    if (std::abs(mat_.trace() - cplx(1.0)) > kNormTol) throw std::invalid_argument("DensityMatrix: trace is not 1");
  }

  int n_;
  CMat mat_;
};

inline DensityMatrix to_density(const PureState& s) {
  return DensityMatrix::trusted(s.n(), s.amps() * s.amps().adjoint());
}

/// Convex combination sum p_i rho_i.
inline DensityMatrix mix(const std::vector<std::pair<double, DensityMatrix>>& parts) {
  if (parts.empty()) throw std::invalid_argument("mix: empty ensemble");
  const int n = parts.front().second.n();
  double total = 0;
  CMat m = CMat::Zero(static_cast<Eigen::Index>(dim_of(n)), static_cast<Eigen::Index>(dim_of(n)));
  for (const auto& [p, rho] : parts) {
    if (p < 0) throw std::invalid_argument("mix: negative probability");
    if (rho.n() != n) throw std::invalid_argument("mix: qubit count mismatch");
    total += p;
    m += p * rho.mat();
  }
  if (std::abs(total - 1.0) > kNormTol) throw std::invalid_argument("mix: probabilities do not sum to 1");
  return DensityMatrix::trusted(n, m);
}

/// Full 2^n x 2^n matrix of `u` acting on `targets`.
inline CMat embed(const Unitary& u, int n, std::span<const int> targets) {
  const auto d = static_cast<Eigen::Index>(dim_of(n));
  CMat full = CMat::Identity(d, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    CVec col = full.col(c);
    apply_matrix_inplace(col, n, u.mat(), targets);
    full.col(c) = col;
  }
  return full;
}

inline DensityMatrix apply_unitary(const DensityMatrix& rho, const Unitary& u, std::span<const int> targets) {
  const CMat full = embed(u, rho.n(), targets);
  CMat m = full * rho.mat() * full.adjoint();
  return DensityMatrix::trusted(rho.n(), 0.5 * (m + m.adjoint()));
}

namespace detail {

struct TraceSplit {
  std::vector<int> keep;     // sorted ascending
  std::vector<int> discard;  // sorted ascending
};

inline TraceSplit split_keep(int n, std::span<const int> keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  check_targets(n, keep, "partial_trace");
  TraceSplit s;
  s.keep.assign(keep.begin(), keep.end());
  std::sort(s.keep.begin(), s.keep.end());
  for (int q = 0; q < n; ++q)
    if (!std::binary_search(s.keep.begin(), s.keep.end(), q)) s.discard.push_back(q);
  return s;
}

}  // namespace detail

/// Reduced state on `keep`; kept qubits retain their relative order.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const int n = rho.n();
  const auto s = detail::split_keep(n, keep);
  const auto ko = detail::local_offsets(n, s.keep);
  const auto dof = detail::local_offsets(n, s.discard);
  const auto dk = static_cast<Eigen::Index>(ko.size());
  CMat out = CMat::Zero(dk, dk);
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index j = 0; j < dk; ++j) {
      cplx acc = 0;
      for (std::size_t t : dof)
        acc += rho.mat()(static_cast<Eigen::Index>(ko[i] | t), static_cast<Eigen::Index>(ko[j] | t));
      out(i, j) = acc;
    }
  return DensityMatrix::trusted(static_cast<int>(s.keep.size()), 0.5 * (out + out.adjoint()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

/// Reduced state of a pure state, computed without forming the full density matrix.
inline DensityMatrix partial_trace(const PureState& psi, std::span<const int> keep) {
  const int n = psi.n();
  const auto s = detail::split_keep(n, keep);
  const auto ko = detail::local_offsets(n, s.keep);
  const auto dof = detail::local_offsets(n, s.discard);
  const auto dk = static_cast<Eigen::Index>(ko.size());
  const auto dd = static_cast<Eigen::Index>(dof.size());
  CMat m(dk, dd);  // psi reshaped as keep x discard
  for (Eigen::Index i = 0; i < dk; ++i)
    for (Eigen::Index t = 0; t < dd; ++t) m(i, t) = psi.amps()[static_cast<Eigen::Index>(ko[i] | dof[t])];
  CMat out = m * m.adjoint();
  return DensityMatrix::trusted(static_cast<int>(s.keep.size()), 0.5 * (out + out.adjoint()));
}

inline DensityMatrix partial_trace(const PureState& psi, std::initializer_list<int> keep) {
  return partial_trace(psi, std::span<const int>(keep.begin(), keep.size()));
}

/// Positive operator-valued measure.
class Povm {
 public:
  explicit Povm(std::vector<CMat> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
    const auto d = elements_.front().rows();
    CMat sum = CMat::Zero(d, d);
    for (const auto& e : elements_) {
      if (e.rows() != d || e.cols() != d) throw std::invalid_argument("Povm: element dimension mismatch");
      if (!is_hermitian(e, kEigTol)) throw std::invalid_argument("Povm: element not Hermitian");
      if (hermitian_eig(e).values.minCoeff() < -kEigTol) throw std::invalid_argument("Povm: element not PSD");
      sum += e;
    }
    if ((sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > kEigTol)
      throw std::invalid_argument("Povm: elements do not sum to identity");
  }

  /// Projective measurement in the computational basis of `dim`.
  static Povm computational(std::size_t dim) {
    std::vector<CMat> es;
    for (std::size_t i = 0; i < dim; ++i) {
      CMat e = CMat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1;
      es.push_back(std::move(e));
    }
    return Povm(std::move(es));
  }

  std::size_t size() const { return elements_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(elements_.front().rows()); }
  const std::vector<CMat>& elements() const { return elements_; }

 private:
  std::vector<CMat> elements_;
};

/// Tr(E_i rho) for each element, clipped at zero and renormalised; drift beyond 1e-9 is an error.
inline std::vector<double> povm_probabilities(const DensityMatrix& rho, const Povm& p) {
  if (p.dim() != rho.dim()) throw std::invalid_argument("povm: dimension mismatch");
  std::vector<double> probs;
  double total = 0;
  for (const auto& e : p.elements()) {
    const double v = std::max(0.0, (e * rho.mat()).trace().real());
    probs.push_back(v);
    total += v;
  }
  if (std::abs(total - 1.0) > kEigTol) throw std::runtime_error("povm: probabilities drift from 1");
  for (double& v : probs) v /= total;
  return probs;
}

inline std::size_t povm_measure(const DensityMatrix& rho, const Povm& p, Rng& rng) {
  return sample_index(povm_probabilities(rho, p), rng);
}

/// Completely positive trace-preserving map in Kraus form.
class Superoperator {
 public:
  explicit Superoperator(std::vector<CMat> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw std::invalid_argument("Superoperator: no Kraus operators");
    const auto in = kraus_.front().cols();
    const auto out = kraus_.front().rows();
    if (log2_exact(static_cast<std::size_t>(in)) < 1 || log2_exact(static_cast<std::size_t>(out)) < 1)
      throw std::invalid_argument("Superoperator: dimensions must be powers of two");
    CMat sum = CMat::Zero(in, in);
    for (const auto& k : kraus_) {
      if (k.cols() != in || k.rows() != out) throw std::invalid_argument("Superoperator: Kraus shape mismatch");
      sum += k.adjoint() * k;
    }
    if ((sum - CMat::Identity(in, in)).cwiseAbs().maxCoeff() > kEigTol)
      throw std::invalid_argument("Superoperator: Kraus operators are not complete");
  }

  std::size_t in_dim() const { return static_cast<std::size_t>(kraus_.front().cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(kraus_.front().rows()); }
  const std::vector<CMat>& kraus() const { return kraus_; }

 private:
  std::vector<CMat> kraus_;
};

inline DensityMatrix apply_superoperator(const DensityMatrix& rho, const Superoperator& s) {
  if (s.in_dim() != rho.dim()) throw std::invalid_argument("apply_superoperator: dimension mismatch");
  const auto d = static_cast<Eigen::Index>(s.out_dim());
  CMat out = CMat::Zero(d, d);
  for (const auto& k : s.kraus()) out += k * rho.mat() * k.adjoint();
  return DensityMatrix::trusted(log2_exact(s.out_dim()), 0.5 * (out + out.adjoint()));
}

/// Pure state on 2n qubits whose first n qubits carry rho: sum_j sqrt(l_j) |e_j>|j>.
inline PureState purify(const DensityMatrix& rho) {
  const int n = rho.n();
  if (2 * n > kMaxQubits) throw std::length_error("purify: 2n exceeds capacity");
  const auto e = hermitian_eig(rho.mat());
  const RVec lam = clip_psd_spectrum(e.values, "purify");
  const auto d = static_cast<Eigen::Index>(rho.dim());
  CVec v = CVec::Zero(d * d);
  // Largest eigenvalue pairs with ancilla |0>, so pure inputs purify to |psi>|0>.
  for (Eigen::Index j = 0; j < d; ++j) {
    const Eigen::Index i = d - 1 - j;
    const double w = std::sqrt(lam[i]);
    if (w == 0) continue;
    for (Eigen::Index a = 0; a < d; ++a) v[a * d + j] += w * e.vectors(a, i);
  }
  return PureState::normalized(std::move(v));
}

/// Half the trace norm of a - b.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const auto e = hermitian_eig(a.mat() - b.mat());
  return std::clamp(0.5 * e.values.cwiseAbs().sum(), 0.0, 1.0);
}

/// Tr sqrt(sqrt(a) b sqrt(a)); equals |<psi|phi>| on pure inputs.
///
/// With a = W W^dagger over the support of a, the nonzero spectrum of
/// sqrt(a) b sqrt(a) equals that of W^dagger b W. Taking `a` as the argument of
/// lower rank keeps rounding noise out of the square roots.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
  auto ea = hermitian_eig(a.mat());
  auto eb = hermitian_eig(b.mat());
  static constexpr double kSupport = 1e-13;
  const auto rank = [](const RVec& v) { return (v.array() > kSupport).count(); };
  const bool swap = rank(eb.values) < rank(ea.values);
  const HermitianEig& e = swap ? eb : ea;
  const CMat& other = swap ? a.mat() : b.mat();
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (e.values[i] > kSupport) cols.push_back(i);
  CMat w(e.vectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    w.col(static_cast<Eigen::Index>(j)) = e.vectors.col(cols[j]) * std::sqrt(e.values[cols[j]]);
  const auto inner = hermitian_eig(w.adjoint() * other * w);
  double f = 0;
  for (Eigen::Index i = 0; i < inner.values.size(); ++i) f += std::sqrt(std::max(0.0, inner.values[i]));
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace qmoney
