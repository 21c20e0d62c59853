#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmoney/state.hpp"

namespace qmoney {

/// One step of a circuit: a dense matrix on `targets`, or a diagonal phase
/// vector on `targets`, fired when every control qubit holds its control value.
struct Gate {
  std::vector<int> targets;
  CMat matrix;   ///< empty when `diagonal` is used
  CVec diagonal; ///< unit-modulus entries, one per local basis state
  std::vector<int> controls;
  std::vector<int> control_values;

  static Gate dense(const Unitary& u, std::vector<int> targets) {
    if (u.dim() != dim_of(static_cast<int>(targets.size())))
      throw std::invalid_argument("Gate: unitary dimension does not match targets");
    return Gate{std::move(targets), u.mat(), CVec(), {}, {}};
  }
  static Gate phases(CVec diag, std::vector<int> targets) {
    if (static_cast<std::size_t>(diag.size()) != dim_of(static_cast<int>(targets.size())))
      throw std::invalid_argument("Gate: diagonal length does not match targets");
    for (Eigen::Index i = 0; i < diag.size(); ++i)
      if (std::abs(std::abs(diag[i]) - 1.0) > kUnitaryTol) throw std::invalid_argument("Gate: phase not unit modulus");
    return Gate{std::move(targets), CMat(), std::move(diag), {}, {}};
  }

  bool is_diagonal() const { return matrix.size() == 0; }

  Gate with_control(int q, int value = 1) const {
    Gate g = *this;
    g.controls.push_back(q);
    g.control_values.push_back(value);
    return g;
  }
  Gate inverse() const {
    Gate g = *this;
    if (is_diagonal()) g.diagonal = diagonal.conjugate();
    else g.matrix = matrix.adjoint();
    return g;
  }
  Gate shifted(int offset) const {
    Gate g = *this;
    for (int& t : g.targets) t += offset;
    for (int& c : g.controls) c += offset;
    return g;
  }

  void apply(CVec& amps, int n) const {
    if (!is_diagonal()) {
      apply_matrix_inplace(amps, n, matrix, targets, controls, control_values);
      return;
    }
    std::vector<int> all(targets);
    all.insert(all.end(), controls.begin(), controls.end());
    detail::check_targets(n, all, "Gate");
    std::size_t cmask = 0, cwant = 0;
    for (std::size_t j = 0; j < controls.size(); ++j) {
      cmask |= qubit_mask(n, controls[j]);
      if (control_values[j]) cwant |= qubit_mask(n, controls[j]);
    }
    const std::size_t k = targets.size();
    for (std::size_t i = 0; i < dim_of(n); ++i) {
      if ((i & cmask) != cwant) continue;
      std::size_t l = 0;
      for (std::size_t j = 0; j < k; ++j) l = (l << 1) | ((i & qubit_mask(n, targets[j])) ? 1 : 0);
      amps[static_cast<Eigen::Index>(i)] *= diagonal[static_cast<Eigen::Index>(l)];
    }
  }
};

/// Ordered gate list on a fixed register width.
class Circuit {
 public:
  explicit Circuit(int n) : n_(n) { check_qubits(n, "Circuit"); }

  int n() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t size() const { return gates_.size(); }

  Circuit& add(Gate g) {
    for (int q : g.targets)
      if (q < 0 || q >= n_) throw std::invalid_argument("Circuit: gate target out of range");
    for (int q : g.controls)
      if (q < 0 || q >= n_) throw std::invalid_argument("Circuit: gate control out of range");
    gates_.push_back(std::move(g));
    return *this;
  }
  Circuit& add(const Unitary& u, std::vector<int> targets) { return add(Gate::dense(u, std::move(targets))); }
  /// Appends `other`, optionally shifted and controlled.
  Circuit& append(const Circuit& other, int offset = 0, std::vector<std::pair<int, int>> controls = {}) {
    for (const auto& g : other.gates()) {
      Gate h = g.shifted(offset);
      for (auto [q, v] : controls) h = h.with_control(q, v);
      add(std::move(h));
    }
    return *this;
  }

  Circuit inverse() const {
    Circuit c(n_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) c.gates_.push_back(it->inverse());
    return c;
  }

  void apply_inplace(CVec& amps) const {
    for (const auto& g : gates_) g.apply(amps, n_);
  }
  PureState apply(const PureState& s) const {
    if (s.n() != n_) throw std::invalid_argument("Circuit: register width mismatch");
    CVec a = s.amps();
    apply_inplace(a);
    return PureState(n_, a / a.norm());
  }
  /// Output on |0...0>.
  PureState run() const { return apply(PureState::zero(n_)); }

  /// Dense matrix of the whole circuit; intended for small n.
  CMat matrix() const {
    const auto d = static_cast<Eigen::Index>(dim_of(n_));
    CMat m = CMat::Identity(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      CVec col = m.col(c);
      apply_inplace(col);
      m.col(c) = col;
    }
    return m;
  }

 private:
  int n_;
  std::vector<Gate> gates_;
};

}  // namespace qmoney
