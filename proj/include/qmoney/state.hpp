#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmoney/linalg.hpp"
#include "qmoney/rng.hpp"

namespace qmoney {

// Qubit q of an n-qubit register is bit (n-1-q) of the basis index: qubit 0 is
// the most significant bit. Every kernel below follows this convention.
inline std::size_t qubit_mask(int n, int q) { return std::size_t{1} << (n - 1 - q); }

/// Consecutive qubit indices [first, first + count).
inline std::vector<int> qubit_range(int first, int count) {
  std::vector<int> r(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) r[static_cast<std::size_t>(i)] = first + i;
  return r;
}

/// Square unitary matrix of power-of-two dimension.
class Unitary {
 public:
  explicit Unitary(CMat m, double tol = kUnitaryTol) : mat_(std::move(m)) {
    if (log2_exact(static_cast<std::size_t>(mat_.rows())) < 0 || mat_.rows() != mat_.cols())
      throw std::invalid_argument("Unitary: dimension must be a power of two");
    if (!is_unitary(mat_, tol)) throw std::invalid_argument("Unitary: matrix is not unitary");
  }

  std::size_t dim() const { return static_cast<std::size_t>(mat_.rows()); }
  int qubits() const { return log2_exact(dim()); }
  const CMat& mat() const { return mat_; }
  Unitary adjoint() const { return Unitary(mat_.adjoint()); }

  static Unitary identity(int k) { return Unitary(CMat::Identity(dim_of(k), dim_of(k))); }
  static Unitary random(int k, Rng& rng) { return Unitary(random_unitary_matrix(dim_of(k), rng)); }

 private:
  CMat mat_;
};

namespace gates {

inline Unitary from2(cplx a, cplx b, cplx c, cplx d) {
  CMat m(2, 2);
  m << a, b, c, d;
  return Unitary(m);
}
inline Unitary I() { return Unitary::identity(1); }
inline Unitary X() { return from2(0, 1, 1, 0); }
inline Unitary Y() { return from2(0, cplx(0, -1), cplx(0, 1), 0); }
inline Unitary Z() { return from2(1, 0, 0, -1); }
inline Unitary S() { return from2(1, 0, 0, cplx(0, 1)); }
inline Unitary H() {
  const double r = 1.0 / std::numbers::sqrt2;
  return from2(r, r, r, -r);
}
/// Counterclockwise rotation of the real plane: |0> -> cos t|0> + sin t|1>.
inline Unitary rot(double theta) {
  return from2(std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta));
}
inline Unitary phase(double phi) { return from2(1, 0, 0, std::polar(1.0, phi)); }

/// Two-qubit gate on (control, target) with `u` applied to the target when control = 1.
inline Unitary controlled(const Unitary& u) {
  const auto d = static_cast<Eigen::Index>(u.dim());
  CMat m = CMat::Identity(2 * d, 2 * d);
  m.block(d, d, d, d) = u.mat();
  return Unitary(m);
}
inline Unitary CNOT() { return controlled(X()); }
inline Unitary CZ() { return controlled(Z()); }
inline Unitary SWAP() {
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
  return Unitary(m);
}

}  // namespace gates

namespace detail {

inline void check_targets(int n, std::span<const int> qs, const char* what) {
  std::size_t seen = 0;
  for (int q : qs) {
    if (q < 0 || q >= n) throw std::invalid_argument(std::string(what) + ": qubit index out of range");
    const std::size_t m = qubit_mask(n, q);
    if (seen & m) throw std::invalid_argument(std::string(what) + ": duplicate qubit");
    seen |= m;
  }
}

/// Basis offsets of the 2^k local states on `targets`, targets[0] most significant.
inline std::vector<std::size_t> local_offsets(int n, std::span<const int> targets) {
  const std::size_t k = targets.size();
  std::vector<std::size_t> off(std::size_t{1} << k, 0);
  for (std::size_t l = 0; l < off.size(); ++l)
    for (std::size_t j = 0; j < k; ++j)
      if (l & (std::size_t{1} << (k - 1 - j))) off[l] |= qubit_mask(n, targets[j]);
  return off;
}

/// Reads and writes the bits of a qubit register inside a basis index,
/// register[0] most significant. Ascending contiguous registers take a shift.
class Register {
 public:
  Register(int n, std::span<const int> qs) : k_(qs.size()) {
    contiguous_ = true;
    for (std::size_t j = 0; j < k_; ++j) {
      masks_.push_back(qubit_mask(n, qs[j]));
      if (j > 0 && qs[j] != qs[j - 1] + 1) contiguous_ = false;
    }
    if (k_ > 0 && contiguous_) {
      shift_ = n - 1 - qs[k_ - 1];
      field_ = ((std::size_t{1} << k_) - 1) << shift_;
    }
  }

  std::uint64_t read(std::size_t index) const {
    if (contiguous_) return (index & field_) >> shift_;
    std::uint64_t v = 0;
    for (std::size_t m : masks_) v = (v << 1) | ((index & m) ? 1 : 0);
    return v;
  }

  std::size_t write(std::size_t index, std::uint64_t v) const {
    if (contiguous_) return (index & ~field_) | (static_cast<std::size_t>(v) << shift_);
    for (std::size_t j = 0; j < k_; ++j) {
      if ((v >> (k_ - 1 - j)) & 1) index |= masks_[j];
      else index &= ~masks_[j];
    }
    return index;
  }

 private:
  std::size_t k_;
  std::vector<std::size_t> masks_;
  bool contiguous_ = false;
  int shift_ = 0;
  std::size_t field_ = 0;
};

}  // namespace detail

/// In-place application of a 2^k x 2^k matrix on `targets`, conditioned on
/// `controls` holding `control_values` (all ones when empty).
inline void apply_matrix_inplace(CVec& amps, int n, const CMat& u, std::span<const int> targets,
                                 std::span<const int> controls = {}, std::span<const int> control_values = {}) {
  const std::size_t k = targets.size();
  if (static_cast<std::size_t>(u.rows()) != (std::size_t{1} << k) || u.rows() != u.cols())
    throw std::invalid_argument("apply: matrix dimension does not match target count");
  std::vector<int> all(targets.begin(), targets.end());
  all.insert(all.end(), controls.begin(), controls.end());
  detail::check_targets(n, all, "apply");
  if (!control_values.empty() && control_values.size() != controls.size())
    throw std::invalid_argument("apply: control value count mismatch");

  if (k == 1 && controls.empty()) {
    const std::size_t m = qubit_mask(n, targets[0]);
    const cplx u00 = u(0, 0), u01 = u(0, 1), u10 = u(1, 0), u11 = u(1, 1);
    const auto size = static_cast<std::size_t>(amps.size());
    for (std::size_t hi = 0; hi < size; hi += 2 * m)
      for (std::size_t i = hi; i < hi + m; ++i) {
        const auto a = static_cast<Eigen::Index>(i), b = static_cast<Eigen::Index>(i | m);
        const cplx x = amps[a], y = amps[b];
        amps[a] = u00 * x + u01 * y;
        amps[b] = u10 * x + u11 * y;
      }
    return;
  }

  std::size_t tmask = 0, cmask = 0, cwant = 0;
  for (int q : targets) tmask |= qubit_mask(n, q);
  for (std::size_t j = 0; j < controls.size(); ++j) {
    const std::size_t m = qubit_mask(n, controls[j]);
    cmask |= m;
    if (control_values.empty() || control_values[j] != 0) cwant |= m;
  }
  const auto off = detail::local_offsets(n, targets);
  const std::size_t dim = dim_of(n);
  CVec local(static_cast<Eigen::Index>(off.size()));
  CVec out(local.size());
  for (std::size_t base = 0; base < dim; ++base) {
    if ((base & tmask) != 0 || (base & cmask) != cwant) continue;
    for (std::size_t l = 0; l < off.size(); ++l) local[static_cast<Eigen::Index>(l)] = amps[static_cast<Eigen::Index>(base | off[l])];
    out.noalias() = u * local;
    for (std::size_t l = 0; l < off.size(); ++l) amps[static_cast<Eigen::Index>(base | off[l])] = out[static_cast<Eigen::Index>(l)];
  }
}

/// Unit vector of 2^n amplitudes.
class PureState {
 public:
  PureState(int n, CVec amps) : n_(n), amps_(std::move(amps)) {
    check_qubits(n_, "PureState");
    if (static_cast<std::size_t>(amps_.size()) != dim_of(n_))
      throw std::invalid_argument("PureState: amplitude count is not 2^n");
    if (std::abs(amps_.squaredNorm() - 1.0) > kNormTol)
      throw std::invalid_argument("PureState: amplitudes not normalized");
  }

  static PureState basis(int n, std::size_t index) {
    check_qubits(n, "PureState::basis");
    if (index >= dim_of(n)) throw std::invalid_argument("PureState::basis: index out of range");
    CVec v = CVec::Zero(static_cast<Eigen::Index>(dim_of(n)));
    v[static_cast<Eigen::Index>(index)] = 1;
    return PureState(n, std::move(v));
  }
  static PureState zero(int n) { return basis(n, 0); }
  /// Normalizes `amps` first; rejects the zero vector.
  static PureState normalized(CVec amps) {
    const int n = log2_exact(static_cast<std::size_t>(amps.size()));
    if (n < 1) throw std::invalid_argument("PureState::normalized: length is not a power of two >= 2");
    const double nrm = amps.norm();
    if (nrm == 0) throw std::invalid_argument("PureState::normalized: zero vector");
    return PureState(n, amps / nrm);
  }
  static PureState random(int n, Rng& rng) {
    check_qubits(n, "PureState::random");
    return PureState(n, random_unit_vector(dim_of(n), rng));
  }
  /// |+>^n.
  static PureState plus(int n) {
    check_qubits(n, "PureState::plus");
    return PureState(n, CVec::Constant(static_cast<Eigen::Index>(dim_of(n)), 1.0 / std::sqrt(double(dim_of(n)))));
  }

  int n() const { return n_; }
  std::size_t dim() const { return dim_of(n_); }
  const CVec& amps() const { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

 private:
  int n_;
  CVec amps_;
};

/// a (x) b; a's qubits come first.
inline PureState tensor(const PureState& a, const PureState& b) {
  if (a.n() + b.n() > kMaxQubits) throw std::length_error("tensor: combined qubit count exceeds capacity");
  return PureState(a.n() + b.n(), kron(a.amps(), b.amps()));
}

/// <a|b>, antilinear in a.
inline cplx inner_product(const PureState& a, const PureState& b) {
  if (a.n() != b.n()) throw std::invalid_argument("inner_product: qubit count mismatch");
  return a.amps().dot(b.amps());
}

inline PureState apply_unitary(const PureState& s, const Unitary& u, std::span<const int> targets) {
  if (u.dim() != dim_of(static_cast<int>(targets.size())))
    throw std::invalid_argument("apply_unitary: unitary dimension does not match target count");
  CVec a = s.amps();
  apply_matrix_inplace(a, s.n(), u.mat(), targets);
  // Renormalise away rounding so long circuits stay inside the PureState invariant.
  return PureState(s.n(), a / a.norm());
}

inline PureState apply_unitary(const PureState& s, const Unitary& u, std::initializer_list<int> targets) {
  return apply_unitary(s, u, std::span<const int>(targets.begin(), targets.size()));
}

/// Born probabilities of the 2^k outcomes on `targets` (targets[0] most significant).
inline std::vector<double> marginal_probabilities(const CVec& amps, int n, std::span<const int> targets) {
  detail::check_targets(n, targets, "marginal_probabilities");
  const detail::Register reg(n, targets);
  std::vector<double> p(std::size_t{1} << targets.size(), 0.0);
  for (std::size_t i = 0; i < dim_of(n); ++i) p[reg.read(i)] += std::norm(amps[static_cast<Eigen::Index>(i)]);
  return p;
}

/// Samples an index from a probability vector that sums to ~1.
inline std::size_t sample_index(const std::vector<double>& p, Rng& rng) {
  double total = 0;
  for (double x : p) total += std::max(x, 0.0);
  double r = rng.uniform() * total;
  std::size_t last_nonzero = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = std::max(p[i], 0.0);
    if (x <= 0) continue;
    last_nonzero = i;
    if (r < x) return i;
    r -= x;
  }
  return last_nonzero;
}

/// Projects onto `outcome` on `targets` and renormalises. Returns the outcome probability.
inline double collapse_inplace(CVec& amps, int n, std::span<const int> targets, std::size_t outcome) {
  const detail::Register reg(n, targets);
  double keep = 0;
  for (std::size_t i = 0; i < dim_of(n); ++i) {
    auto& a = amps[static_cast<Eigen::Index>(i)];
    if (reg.read(i) == outcome) keep += std::norm(a);
    else a = 0;
  }
  if (keep > 0) amps /= std::sqrt(keep);
  return keep;
}

/// Samples and applies a computational-basis measurement on `targets`. Returns the outcome.
inline std::size_t measure_inplace(CVec& amps, int n, std::span<const int> targets, Rng& rng) {
  const auto p = marginal_probabilities(amps, n, targets);
  const std::size_t o = sample_index(p, rng);
  collapse_inplace(amps, n, targets, o);
  return o;
}

struct MeasureResult {
  std::vector<int> bits;  ///< one bit per target, in target order
  PureState state;
};

inline MeasureResult measure(const PureState& s, std::span<const int> targets, Rng& rng) {
  CVec a = s.amps();
  const std::size_t o = measure_inplace(a, s.n(), targets, rng);
  std::vector<int> bits(targets.size());
  for (std::size_t j = 0; j < targets.size(); ++j) bits[j] = static_cast<int>((o >> (targets.size() - 1 - j)) & 1);
  return {std::move(bits), PureState(s.n(), std::move(a))};
}

inline MeasureResult measure(const PureState& s, std::initializer_list<int> targets, Rng& rng) {
  return measure(s, std::span<const int>(targets.begin(), targets.size()), rng);
}

enum class OverlapOutcome { plus, minus };

/// Control-qubit interference test: prepares (|0>|a> + |1>|b>)/sqrt2, Hadamards
/// the control and measures it. Returns plus with probability (1 + Re<a|b>)/2.
inline OverlapOutcome overlap_test(const PureState& a, const PureState& b, Rng& rng) {
  if (a.n() != b.n()) throw std::invalid_argument("overlap_test: qubit count mismatch");
  if (a.n() + 1 > kMaxQubits) throw std::length_error("overlap_test: capacity exceeded");
  const int n = a.n() + 1;
  CVec v(static_cast<Eigen::Index>(dim_of(n)));
  const auto half = static_cast<Eigen::Index>(a.dim());
  v.head(half) = a.amps() / std::numbers::sqrt2;
  v.tail(half) = b.amps() / std::numbers::sqrt2;
  const int ctrl[] = {0};
  apply_matrix_inplace(v, n, gates::H().mat(), ctrl);
  return measure_inplace(v, n, ctrl, rng) == 0 ? OverlapOutcome::plus : OverlapOutcome::minus;
}

}  // namespace qmoney
