#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "qmoney/density.hpp"
#include "qmoney/oracle.hpp"

namespace qmoney {

enum class HhMode { equal_ranges, disjoint_ranges };

struct HhReport {
  HhMode mode;
  int n = 0;                       ///< input bits of f and g
  int m = 0;                       ///< output bits (H register width)
  double fidelity_before = 0;      ///< <Bell| rho |Bell> on (last R qubit, B) before decoding
  double fidelity_after = 0;       ///< equal ranges: after the decoding permutation
  bool permutation_is_identity = false;
  double best_random = 0;          ///< disjoint ranges: best over random R-unitaries
  int samples = 0;
  double certificate_bound = 0;    ///< disjoint ranges: exact max over all R-unitaries
  double block_offdiag_norm = 0;   ///< size of the B-coherences in rho_RB; 0 certifies the bound
};

namespace detail {

/// Layout: R = qubits 0..n (x then the branch bit), B = qubit n+1, H = the last m qubits.
inline CVec hh_state(const BooleanOracle& f, const BooleanOracle& g) {
  const int n = f.n_in(), m = f.n_out();
  const int total = n + 2 + m;
  CVec psi = CVec::Zero(static_cast<Eigen::Index>(dim_of(total)));
  const double amp = 1.0 / std::sqrt(double(dim_of(n + 1)));
  for (std::uint64_t x = 0; x < dim_of(n); ++x) {
    const std::uint64_t r0 = x << 1, r1 = (x << 1) | 1;
    psi[static_cast<Eigen::Index>((((r0 << 1) | 0) << m) | f.query(x))] += amp;
    psi[static_cast<Eigen::Index>((((r1 << 1) | 1) << m) | g.query(x))] += amp;
  }
  return psi;
}

/// Squared fidelity of the (last R qubit, B) marginal with (|00> + |11>)/sqrt2.
inline double hh_bell_fidelity(const CVec& psi, int n, int m) {
  const int total = n + 2 + m;
  const auto rho = partial_trace(PureState(total, psi), {n, n + 1}).mat();
  return 0.5 * (rho(0, 0) + rho(0, 3) + rho(3, 0) + rho(3, 3)).real();
}

inline void check_injective(const BooleanOracle& o, const char* name) {
  std::set<std::uint64_t> seen(o.table().begin(), o.table().end());
  if (seen.size() != o.table().size()) throw std::invalid_argument(std::string("hh_decode_demo: ") + name + " is not injective");
}

}  // namespace detail

/// Builds |psi>_RBH = 2^{-(n+1)/2} sum_x (|x,0>|0>|f(x)> + |x,1>|1>|g(x)>).
/// Equal ranges: applies |x,1> -> |f^{-1}(g(x)),1> on R and reports the Bell
/// fidelity of (last R qubit, B). Disjoint ranges: searches `samples` Haar
/// R-unitaries and computes the exact optimum from rho_RB, which is block
/// diagonal in B: max_U F = 1/2 sum_b KyFan_{2^n}(<b|rho_RB|b>).
inline HhReport hh_decode_demo(const BooleanOracle& f, const BooleanOracle& g, HhMode mode, Rng& rng,
                               int samples = 10000) {
  if (f.n_in() != g.n_in() || f.n_out() != g.n_out()) throw std::invalid_argument("hh_decode_demo: f and g widths differ");
  const int n = f.n_in(), m = f.n_out();
  if (n > 5) throw std::invalid_argument("hh_decode_demo: n must be <= 5");
  if (n + 2 + m > kMaxQubits) throw std::length_error("hh_decode_demo: capacity exceeded");
  detail::check_injective(f, "f");
  detail::check_injective(g, "g");
  const std::set<std::uint64_t> rf(f.table().begin(), f.table().end()), rg(g.table().begin(), g.table().end());
  std::vector<std::uint64_t> common;
  std::set_intersection(rf.begin(), rf.end(), rg.begin(), rg.end(), std::back_inserter(common));
  if (mode == HhMode::equal_ranges && rf != rg) throw std::invalid_argument("hh_decode_demo: ranges are not equal");
  if (mode == HhMode::disjoint_ranges && !common.empty())
    throw std::invalid_argument("hh_decode_demo: ranges are not disjoint");

  HhReport rep;
  rep.mode = mode;
  rep.n = n;
  rep.m = m;
  const int total = n + 2 + m;
  CVec psi = detail::hh_state(f, g);
  rep.fidelity_before = detail::hh_bell_fidelity(psi, n, m);

  if (mode == HhMode::equal_ranges) {
    std::map<std::uint64_t, std::uint64_t> finv;
    for (std::uint64_t x = 0; x < dim_of(n); ++x) finv[f.peek(x)] = x;
    // Permutation on R; the branch-0 half is fixed.
    std::vector<std::uint64_t> perm(dim_of(n + 1));
    rep.permutation_is_identity = true;
    for (std::uint64_t x = 0; x < dim_of(n); ++x) {
      perm[x << 1] = x << 1;
      perm[(x << 1) | 1] = (finv.at(g.peek(x)) << 1) | 1;
      if (perm[(x << 1) | 1] != ((x << 1) | 1)) rep.permutation_is_identity = false;
    }
    CVec out = CVec::Zero(psi.size());
    const int rest = total - (n + 1);
    const std::size_t low = dim_of(rest);
    for (std::size_t i = 0; i < dim_of(total); ++i) {
      const std::size_t r = i / low, tail = i % low;
      out[static_cast<Eigen::Index>(perm[r] * low + tail)] += psi[static_cast<Eigen::Index>(i)];
    }
    rep.fidelity_after = detail::hh_bell_fidelity(out, n, m);
    return rep;
  }

  // rho_RB on n + 2 qubits; blocks rho_{ij} = <i|_B rho_RB |j>_B act on R.
  std::vector<int> rb = qubit_range(0, n + 2);
  const CMat rho = partial_trace(PureState(total, psi), rb).mat();
  const auto dR = static_cast<Eigen::Index>(dim_of(n + 1));
  CMat blk[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      blk[i][j].resize(dR, dR);
      for (Eigen::Index a = 0; a < dR; ++a)
        for (Eigen::Index b = 0; b < dR; ++b) blk[i][j](a, b) = rho(2 * a + i, 2 * b + j);
    }
  rep.block_offdiag_norm = blk[0][1].norm();

  // F(U) = 1/2 sum_{ij} Tr[(|j><i|_r (x) I) U rho_{ij} U^dagger], r = last R qubit.
  const auto bell = [&](const CMat& u) {
    double f_val = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const CMat x = u * blk[i][j] * u.adjoint();
        cplx tr = 0;
        for (Eigen::Index rp = 0; rp < dR / 2; ++rp) tr += x(2 * rp + i, 2 * rp + j);
        f_val += 0.5 * tr.real();
      }
    return f_val;
  };
  rep.samples = samples;
  rep.best_random = bell(CMat::Identity(dR, dR));
  for (int s = 0; s < samples; ++s) rep.best_random = std::max(rep.best_random, bell(random_unitary_matrix(static_cast<std::size_t>(dR), rng)));

  double bound = 0;
  for (int b = 0; b < 2; ++b) {
    const auto e = hermitian_eig(blk[b][b]);
    for (Eigen::Index k = 0; k < dR / 2; ++k) bound += std::max(0.0, e.values[dR - 1 - k]);
  }
  rep.certificate_bound = 0.5 * bound;
  return rep;
}

}  // namespace qmoney
