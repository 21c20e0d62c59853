#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qmoney/state.hpp"

namespace qmoney {

/// Joint state of `qubits()` qubits kept as a tensor product of factors. Qubits
/// in different factors are unentangled; each factor is a dense vector over
/// its own qubit list (first listed qubit most significant). Measurements only
/// touch the owning factor, so a bundle of many BB84-style registers costs
/// O(total qubits) per verification rather than O(2^total).
class ProductState {
 public:
  struct Factor {
    std::vector<int> qubits;
    CVec amps;
  };

  /// All qubits in |0>, each its own factor.
  explicit ProductState(int total) : total_(total) {
    if (total < 1) throw std::invalid_argument("ProductState: need at least one qubit");
    for (int q = 0; q < total; ++q) {
      CVec z = CVec::Zero(2);
      z[0] = 1;
      factors_.push_back({{q}, std::move(z)});
    }
    reindex();
  }

  /// `s` placed at qubits offset.. of a `total`-qubit register (default: just
  /// large enough). Leading qubits that factor out become their own factors.
  static ProductState from_pure(const PureState& s, int offset = 0, int total = -1) {
    if (total < 0) total = offset + s.n();
    ProductState p(total);
    p.place(s, offset);
    return p;
  }

  int qubits() const { return total_; }
  const std::vector<Factor>& factors() const { return factors_; }

  /// Overwrites qubits offset..offset+n-1 with `s`. Every factor touching that
  /// range must lie inside it. Leading qubits that factor out are split off.
  void place(const PureState& s, int offset) {
    std::vector<int> qs = qubit_range(offset, s.n());
    CVec amps = s.amps();
    // Peel product qubits off the front while possible.
    while (qs.size() > 1) {
      const auto split = split_leading(amps, static_cast<int>(qs.size()));
      if (!split) break;
      replace({qs[0]}, split->first);
      qs.erase(qs.begin());
      amps = split->second;
    }
    replace(qs, std::move(amps));
  }

  /// Installs a dense factor on `qs`, discarding the factors it covers.
  void replace(std::vector<int> qs, CVec amps) {
    if (amps.size() != static_cast<Eigen::Index>(dim_of(static_cast<int>(qs.size()))))
      throw std::invalid_argument("ProductState::replace: amplitude count does not match qubit list");
    if (std::abs(amps.squaredNorm() - 1.0) > kNormTol) throw std::invalid_argument("ProductState::replace: not normalized");
    std::vector<bool> covered(static_cast<std::size_t>(total_), false);
    for (int q : qs) {
      if (q < 0 || q >= total_ || covered[static_cast<std::size_t>(q)])
        throw std::invalid_argument("ProductState::replace: bad qubit list");
      covered[static_cast<std::size_t>(q)] = true;
    }
    std::vector<Factor> kept;
    for (auto& f : factors_) {
      const auto in = std::count_if(f.qubits.begin(), f.qubits.end(), [&](int q) { return covered[static_cast<std::size_t>(q)]; });
      if (in == 0) kept.push_back(std::move(f));
      else if (static_cast<std::size_t>(in) != f.qubits.size())
        throw std::invalid_argument("ProductState::replace: would split an entangled factor");
    }
    kept.push_back({std::move(qs), std::move(amps)});
    factors_ = std::move(kept);
    reindex();
  }

  /// Measures qubit q in the basis {b|0>, b|1>} for a 2x2 unitary b; the
  /// post-measurement state is the corresponding basis vector.
  std::size_t measure(int q, const CMat& b, Rng& rng) {
    auto& f = factors_[owner_.at(static_cast<std::size_t>(q)).first];
    const int pos = owner_[static_cast<std::size_t>(q)].second;
    const int k = static_cast<int>(f.qubits.size());
    const int t[] = {pos};
    apply_matrix_inplace(f.amps, k, b.adjoint(), t);
    const std::size_t o = measure_inplace(f.amps, k, t, rng);
    apply_matrix_inplace(f.amps, k, b, t);
    return o;
  }

  /// Applies a 2x2 unitary to qubit q.
  void apply(int q, const CMat& u) {
    auto& f = factors_[owner_.at(static_cast<std::size_t>(q)).first];
    const int t[] = {owner_[static_cast<std::size_t>(q)].second};
    apply_matrix_inplace(f.amps, static_cast<int>(f.qubits.size()), u, t);
  }

  /// Dense vector over all qubits, qubit 0 most significant.
  PureState to_pure() const {
    if (total_ > kMaxQubits) throw std::length_error("ProductState::to_pure: capacity exceeded");
    CVec out = CVec::Ones(static_cast<Eigen::Index>(dim_of(total_)));
    for (const auto& f : factors_) {
      const detail::Register reg(total_, f.qubits);
      for (std::size_t i = 0; i < dim_of(total_); ++i) out[static_cast<Eigen::Index>(i)] *= f.amps[static_cast<Eigen::Index>(reg.read(i))];
    }
    return PureState(total_, std::move(out));
  }

 private:
  /// If amps (over k qubits) is a|0>|x> + b|1>|y> with x, y parallel, returns
  /// the leading qubit and the remainder.
  static std::optional<std::pair<CVec, CVec>> split_leading(const CVec& amps, int k) {
    const auto half = static_cast<Eigen::Index>(dim_of(k - 1));
    const CVec x = amps.head(half), y = amps.tail(half);
    const double nx = x.norm(), ny = y.norm();
    CVec head(2);
    CVec rest;
    if (ny < 1e-12) {
      head << 1, 0;
      rest = x / nx;
    } else if (nx < 1e-12) {
      head << 0, 1;
      rest = y / ny;
    } else {
      rest = x / nx;
      const cplx ov = rest.dot(y);  // <rest|y>
      if ((y - ov * rest).norm() > 1e-12) return std::nullopt;
      head << nx, ov;
      head /= head.norm();
    }
    return std::make_pair(head, rest);
  }

  void reindex() {
    owner_.assign(static_cast<std::size_t>(total_), {0, 0});
    for (std::size_t i = 0; i < factors_.size(); ++i)
      for (std::size_t j = 0; j < factors_[i].qubits.size(); ++j)
        owner_[static_cast<std::size_t>(factors_[i].qubits[j])] = {i, static_cast<int>(j)};
  }

  int total_;
  std::vector<Factor> factors_;
  std::vector<std::pair<std::size_t, int>> owner_;  ///< qubit -> (factor, position)
};

}  // namespace qmoney
