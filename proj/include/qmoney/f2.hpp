#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/rng.hpp"

namespace qmoney {

inline constexpr int kMaxF2Dim = 64;

/// Vector in F2^n, n <= 64. Coordinate i is stored at bit i.
class VecF2 {
 public:
  VecF2() = default;
  explicit VecF2(int n, std::uint64_t bits = 0) : n_(n), bits_(bits & mask(n)) {
    if (n < 0 || n > kMaxF2Dim) throw std::invalid_argument("VecF2: length out of range");
  }

  /// Parses the text form: coordinate 0 first, characters '0'/'1'.
  static VecF2 parse(std::string_view s) {
    VecF2 v(static_cast<int>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '1') v.bits_ |= std::uint64_t{1} << i;
      else if (s[i] != '0') throw std::invalid_argument("VecF2::parse: expected 0/1 string");
    }
    return v;
  }
  static VecF2 unit(int n, int i) { return VecF2(n, std::uint64_t{1} << i); }
  static VecF2 random(int n, Rng& rng) { return VecF2(n, rng.next_u64()); }

  int n() const { return n_; }
  std::uint64_t bits() const { return bits_; }
  bool get(int i) const { return (bits_ >> i) & 1; }
  void set(int i, bool b) {
    if (b) bits_ |= std::uint64_t{1} << i;
    else bits_ &= ~(std::uint64_t{1} << i);
  }
  bool is_zero() const { return bits_ == 0; }
  int weight() const { return std::popcount(bits_); }
  /// Lowest set coordinate, or -1 for the zero vector.
  int pivot() const { return bits_ == 0 ? -1 : std::countr_zero(bits_); }

  VecF2 operator^(const VecF2& o) const {
    same(o);
    return VecF2(n_, bits_ ^ o.bits_);
  }
  VecF2& operator^=(const VecF2& o) {
    same(o);
    bits_ ^= o.bits_;
    return *this;
  }
  bool operator==(const VecF2&) const = default;
  auto operator<=>(const VecF2&) const = default;

  std::string str() const {
    std::string s(static_cast<std::size_t>(n_), '0');
    for (int i = 0; i < n_; ++i)
      if (get(i)) s[static_cast<std::size_t>(i)] = '1';
    return s;
  }

  /// Basis index of |v> on an n-qubit register: coordinate i is qubit i.
  std::size_t to_index() const {
    std::size_t idx = 0;
    for (int i = 0; i < n_; ++i) idx = (idx << 1) | (get(i) ? 1 : 0);
    return idx;
  }
  static VecF2 from_index(int n, std::size_t idx) {
    VecF2 v(n);
    for (int i = 0; i < n; ++i) v.set(i, (idx >> (n - 1 - i)) & 1);
    return v;
  }

 private:
  static std::uint64_t mask(int n) { return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1); }
  void same(const VecF2& o) const {
    if (o.n_ != n_) throw std::invalid_argument("VecF2: length mismatch");
  }

  int n_ = 0;
  std::uint64_t bits_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const VecF2& v) { return os << v.str(); }

/// Inner product mod 2.
inline int dot(const VecF2& a, const VecF2& b) {
  if (a.n() != b.n()) throw std::invalid_argument("dot: length mismatch");
  return std::popcount(a.bits() & b.bits()) & 1;
}

/// Subspace of F2^n held as its reduced row echelon basis: rows sorted by
/// pivot (lowest set coordinate), and each pivot coordinate is zero in every
/// other row. Equal subspaces therefore compare equal bitwise.
class SubspaceF2 {
 public:
  explicit SubspaceF2(int n = 0) : n_(n) {
    if (n < 0 || n > kMaxF2Dim) throw std::invalid_argument("SubspaceF2: dimension out of range");
  }

  int n() const { return n_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<VecF2>& basis() const { return basis_; }
  bool operator==(const SubspaceF2&) const = default;

  /// Canonical span of `vectors` (Gauss-Jordan elimination).
  static SubspaceF2 span(int n, const std::vector<VecF2>& vectors) {
    SubspaceF2 s(n);
    for (const auto& v : vectors) {
      if (v.n() != n) throw std::invalid_argument("row_reduce: length mismatch");
      s.insert(v);
    }
    return s;
  }

  static SubspaceF2 full(int n) {
    SubspaceF2 s(n);
    for (int i = 0; i < n; ++i) s.basis_.push_back(VecF2::unit(n, i));
    return s;
  }

  /// Reduces v against the basis; zero iff v is in the span.
  VecF2 reduce(VecF2 v) const {
    for (const auto& b : basis_)
      if (v.get(b.pivot())) v ^= b;
    return v;
  }

  bool contains(const VecF2& v) const {
    if (v.n() != n_) throw std::invalid_argument("member: length mismatch");
    return reduce(v).is_zero();
  }

  /// Adds v to the span; returns false when v was already in it.
  bool insert(VecF2 v) {
    v = reduce(v);
    if (v.is_zero()) return false;
    const int p = v.pivot();
    for (auto& b : basis_)
      if (b.get(p)) b ^= v;
    const auto pos = std::lower_bound(basis_.begin(), basis_.end(), p,
                                      [](const VecF2& row, int piv) { return row.pivot() < piv; });
    basis_.insert(pos, v);
    return true;
  }

  /// All 2^dim elements, ordered by the binary counter over basis coefficients.
  std::vector<VecF2> elements() const {
    if (dim() > 24) throw std::length_error("SubspaceF2::elements: too many elements");
    std::vector<VecF2> out;
    out.reserve(std::size_t{1} << dim());
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << dim()); ++c) {
      VecF2 v(n_);
      for (int j = 0; j < dim(); ++j)
        if ((c >> j) & 1) v ^= basis_[static_cast<std::size_t>(j)];
      out.push_back(v);
    }
    return out;
  }

  /// One row per line, text form of VecF2.
  std::string str() const {
    std::string s;
    for (const auto& b : basis_) s += b.str() + "\n";
    return s;
  }

 private:
  int n_;
  std::vector<VecF2> basis_;
};

inline SubspaceF2 row_reduce(int n, const std::vector<VecF2>& vectors) { return SubspaceF2::span(n, vectors); }
inline SubspaceF2 row_reduce(const std::vector<VecF2>& vectors) {
  return vectors.empty() ? SubspaceF2(0) : SubspaceF2::span(vectors.front().n(), vectors);
}

inline bool member(const SubspaceF2& s, const VecF2& v) { return s.contains(v); }

/// {v : v.z = 0 for every sample z}.
inline SubspaceF2 solve_orthogonal(int n, const std::vector<VecF2>& samples) {
  const SubspaceF2 rows = SubspaceF2::span(n, samples);
  // Free coordinates are the non-pivot columns of the RREF; each yields one kernel vector.
  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (const auto& r : rows.basis()) is_pivot[static_cast<std::size_t>(r.pivot())] = true;
  std::vector<VecF2> kernel;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    VecF2 v = VecF2::unit(n, f);
    for (const auto& r : rows.basis())
      if (r.get(f)) v.set(r.pivot(), true);
    kernel.push_back(v);
  }
  return SubspaceF2::span(n, kernel);
}

inline SubspaceF2 dual(const SubspaceF2& s) { return solve_orthogonal(s.n(), s.basis()); }

/// Uniform subspace of the given dimension: draw `dim` uniform vectors and
/// retry until they are independent.
inline SubspaceF2 random_subspace(int n, int dim, Rng& rng) {
  if (dim < 0 || dim > n) throw std::invalid_argument("random_subspace: dim out of range");
  for (;;) {
    SubspaceF2 s(n);
    bool ok = true;
    for (int i = 0; i < dim && ok; ++i) ok = s.insert(VecF2::random(n, rng));
    if (ok) return s;
  }
}

inline SubspaceF2 intersect(const SubspaceF2& a, const SubspaceF2& b) {
  if (a.n() != b.n()) throw std::invalid_argument("intersect: length mismatch");
  // (A cap B)-perp = A-perp + B-perp.
  std::vector<VecF2> gens = dual(a).basis();
  const auto db = dual(b).basis();
  gens.insert(gens.end(), db.begin(), db.end());
  return dual(SubspaceF2::span(a.n(), gens));
}

inline SubspaceF2 parse_subspace(int n, std::istream& in) {
  std::vector<VecF2> rows;
  std::string line;
  while (std::getline(in, line)) {
    line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r' || c == '\t'; }),
               line.end());
    if (line.empty() || line[0] == '#') continue;
    VecF2 v = VecF2::parse(line);
    if (n < 0) n = v.n();
    if (v.n() != n) throw std::invalid_argument("parse_subspace: row length mismatch");
    rows.push_back(v);
  }
  if (n < 0) throw std::invalid_argument("parse_subspace: empty input and unknown dimension");
  return SubspaceF2::span(n, rows);
}

}  // namespace qmoney
