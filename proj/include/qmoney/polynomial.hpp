#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmoney/hidden_subspace.hpp"

namespace qmoney {

/// Multilinear polynomial over F2 in n <= 64 variables with monomials of
/// degree at most 3. A monomial is the bitmask of its variables; 0 is the
/// constant 1. Monomials are kept sorted and unique, so adding one twice
/// cancels it.
class Poly3F2 {
 public:
  static constexpr int kMaxDegree = 3;

  explicit Poly3F2(int n = 0) : n_(n) {
    if (n < 0 || n > kMaxF2Dim) throw std::invalid_argument("Poly3F2: variable count out of range");
  }
  Poly3F2(int n, std::vector<std::uint64_t> monomials) : Poly3F2(n) {
    for (auto m : monomials) toggle(m);
  }

  int n() const { return n_; }
  const std::vector<std::uint64_t>& monomials() const { return mono_; }
  bool is_zero() const { return mono_.empty(); }
  int degree() const {
    int d = 0;
    for (auto m : mono_) d = std::max(d, std::popcount(m));
    return d;
  }
  bool operator==(const Poly3F2&) const = default;

  /// Adds the monomial (mod 2).
  void toggle(std::uint64_t m) {
    if (std::popcount(m) > kMaxDegree) throw std::invalid_argument("Poly3F2: monomial degree exceeds 3");
    if (n_ < 64 && (m >> n_)) throw std::invalid_argument("Poly3F2: monomial uses a variable beyond n");
    auto it = std::lower_bound(mono_.begin(), mono_.end(), m);
    if (it != mono_.end() && *it == m) mono_.erase(it);
    else mono_.insert(it, m);
  }

  /// Value at x, coordinate i of x being variable i.
  int eval(const VecF2& x) const {
    if (x.n() != n_) throw std::invalid_argument("Poly3F2::eval: length mismatch");
    return eval_bits(x.bits());
  }
  int eval_bits(std::uint64_t x) const {
    int v = 0;
    for (auto m : mono_) v ^= (m & x) == m;
    return v;
  }

  /// Text form: "0*2*5+1+3" with each monomial's indices ascending, monomials
  /// in ascending mask order, "1" for the constant and "0" for the zero polynomial.
  std::string str() const {
    if (mono_.empty()) return "0";
    std::string s;
    for (std::size_t k = 0; k < mono_.size(); ++k) {
      if (k) s += '+';
      const auto m = mono_[k];
      if (m == 0) {
        s += '1';
        continue;
      }
      bool first = true;
      for (int i = 0; i < 64; ++i)
        if ((m >> i) & 1) {
          if (!first) s += '*';
          s += std::to_string(i);
          first = false;
        }
    }
    return s;
  }

  static Poly3F2 parse(int n, std::string_view text) {
    std::string t;
    for (char c : text)
      if (c != ' ' && c != '\t' && c != '\r') t += c;
    if (t.empty()) throw std::invalid_argument("Poly3F2::parse: empty polynomial");
    Poly3F2 p(n);
    if (t == "0") return p;
    std::stringstream terms(t);
    std::string term;
    while (std::getline(terms, term, '+')) {
      if (term.empty()) throw std::invalid_argument("Poly3F2::parse: empty monomial");
      if (term == "1") {
        p.toggle(0);
        continue;
      }
      std::uint64_t m = 0;
      int last = -1;
      std::stringstream vars(term);
      std::string v;
      while (std::getline(vars, v, '*')) {
        if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
          throw std::invalid_argument("Poly3F2::parse: bad variable index '" + v + "'");
        const int i = std::stoi(v);
        if (i >= n) throw std::invalid_argument("Poly3F2::parse: variable index beyond n");
        if (i <= last) throw std::invalid_argument("Poly3F2::parse: indices must be strictly ascending");
        last = i;
        m |= std::uint64_t{1} << i;
      }
      p.toggle(m);
    }
    return p;
  }

 private:
  int n_;
  std::vector<std::uint64_t> mono_;
};

inline std::string format_polys(const std::vector<Poly3F2>& ps) {
  std::string s;
  for (const auto& p : ps) s += p.str() + "\n";
  return s;
}

/// One polynomial per line; blank lines and '#' comments skipped.
inline std::vector<Poly3F2> parse_polys(int n, std::istream& in) {
  std::vector<Poly3F2> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    out.push_back(Poly3F2::parse(n, line));
  }
  return out;
}

/// Public polynomials for one hidden-subspace note. `noisy_p`/`noisy_q` is
/// ground truth for tests and reports; attacks never read it.
struct PolyInstance {
  int n = 0;
  std::uint64_t serial = 0;
  std::vector<Poly3F2> ps, qs;
  std::vector<bool> noisy_p, noisy_q;
  int noisy_count = 0;  ///< public: how many entries of each list are noisy
};

namespace detail {

/// Product of polynomials given as toggle sets of monomial masks.
inline std::set<std::uint64_t> poly_mul(const std::set<std::uint64_t>& a, const std::set<std::uint64_t>& b) {
  std::set<std::uint64_t> out;
  for (auto x : a)
    for (auto y : b) {
      const auto m = x | y;
      if (!out.erase(m)) out.insert(m);
    }
  return out;
}

/// p(M x) where row i of M is the linear form giving the new variable i.
inline Poly3F2 compose_linear(const Poly3F2& p, const std::vector<std::uint64_t>& rows) {
  std::set<std::uint64_t> acc;
  for (auto m : p.monomials()) {
    std::set<std::uint64_t> term{0};
    for (int i = 0; i < 64; ++i)
      if ((m >> i) & 1) {
        std::set<std::uint64_t> form;
        for (int j = 0; j < 64; ++j)
          if ((rows[static_cast<std::size_t>(i)] >> j) & 1) form.insert(std::uint64_t{1} << j);
        term = poly_mul(term, form);
      }
    for (auto t : term)
      if (!acc.erase(t)) acc.insert(t);
  }
  return Poly3F2(p.n(), {acc.begin(), acc.end()});
}

/// Inverse of an invertible n x n matrix over F2 whose column j is cols[j];
/// returns the rows of the inverse.
inline std::vector<std::uint64_t> invert_columns(int n, const std::vector<VecF2>& cols) {
  // Row r of the matrix: bit j set iff cols[j] has coordinate r.
  std::vector<std::uint64_t> a(static_cast<std::size_t>(n), 0), inv(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n; ++r) {
    for (int j = 0; j < n; ++j)
      if (cols[static_cast<std::size_t>(j)].get(r)) a[static_cast<std::size_t>(r)] |= std::uint64_t{1} << j;
    inv[static_cast<std::size_t>(r)] = std::uint64_t{1} << r;
  }
  for (int c = 0; c < n; ++c) {
    int piv = c;
    while (piv < n && !((a[static_cast<std::size_t>(piv)] >> c) & 1)) ++piv;
    if (piv == n) throw std::invalid_argument("invert_columns: singular matrix");
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(c)]);
    std::swap(inv[static_cast<std::size_t>(piv)], inv[static_cast<std::size_t>(c)]);
    for (int r = 0; r < n; ++r)
      if (r != c && ((a[static_cast<std::size_t>(r)] >> c) & 1)) {
        a[static_cast<std::size_t>(r)] ^= a[static_cast<std::size_t>(c)];
        inv[static_cast<std::size_t>(r)] ^= inv[static_cast<std::size_t>(c)];
      }
  }
  return inv;
}

/// Uniformly random degree <= 3 polynomial vanishing on span(e_0..e_{h-1}):
/// every monomial touching a variable >= h enters with probability 1/2.
inline Poly3F2 random_canonical_vanishing(int n, int h, Rng& rng) {
  const std::uint64_t outside = (n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1) & ~((std::uint64_t{1} << h) - 1);
  Poly3F2 p(n);
  for (int a = 0; a < n; ++a) {
    const std::uint64_t ma = std::uint64_t{1} << a;
    if ((ma & outside) && rng.bernoulli(0.5)) p.toggle(ma);
    for (int b = a + 1; b < n; ++b) {
      const std::uint64_t mb = ma | (std::uint64_t{1} << b);
      if ((mb & outside) && rng.bernoulli(0.5)) p.toggle(mb);
      for (int c = b + 1; c < n; ++c) {
        const std::uint64_t mc = mb | (std::uint64_t{1} << c);
        if ((mc & outside) && rng.bernoulli(0.5)) p.toggle(mc);
      }
    }
  }
  return p;
}

inline Poly3F2 random_poly3(int n, Rng& rng) {
  Poly3F2 p = random_canonical_vanishing(n, 0, rng);
  if (rng.bernoulli(0.5)) p.toggle(0);
  return p;
}

/// Random invertible map carrying span(e_0..e_{h-1}) onto s, as the rows of
/// its inverse: a vector x lies in s iff the last n-h coordinates of rows*x vanish.
inline std::vector<std::uint64_t> canonical_chart(const SubspaceF2& s, Rng& rng) {
  const int n = s.n();
  SubspaceF2 acc(n);
  std::vector<VecF2> cols;
  const auto elems = s.elements();
  while (acc.dim() < s.dim()) {
    const VecF2 v = elems[rng.below(elems.size())];
    if (acc.insert(v)) cols.push_back(v);
  }
  while (acc.dim() < n) {
    const VecF2 v = VecF2::random(n, rng);
    if (acc.insert(v)) cols.push_back(v);
  }
  return invert_columns(n, cols);
}

/// Fraction of the elements of s on which p vanishes.
inline double vanishing_fraction(const Poly3F2& p, const SubspaceF2& s) {
  const auto elems = s.elements();
  std::size_t z = 0;
  for (const auto& v : elems) z += p.eval(v) == 0;
  return double(z) / double(elems.size());
}

inline std::vector<Poly3F2> polys_draw(const SubspaceF2& s, int m, int noisy, std::vector<bool>& is_noisy, Rng& rng) {
  const int n = s.n();
  const auto chart = canonical_chart(s, rng);
  std::vector<Poly3F2> out;
  for (int i = 0; i < m; ++i) out.push_back(compose_linear(random_canonical_vanishing(n, s.dim(), rng), chart));
  is_noisy.assign(static_cast<std::size_t>(m), false);
  // Noisy slots: a uniform subset of size `noisy`.
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < noisy; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(m - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    const auto slot = static_cast<std::size_t>(idx[static_cast<std::size_t>(i)]);
    Poly3F2 p(n);
    double f = 0;
    do {
      p = random_poly3(n, rng);
      f = vanishing_fraction(p, s);
    } while (f < 0.25 || f > 0.75);
    out[slot] = p;
    is_noisy[slot] = true;
  }
  return out;
}

/// True when the entries not flagged noisy vanish together exactly on s.
inline bool cuts_out(const SubspaceF2& s, const std::vector<Poly3F2>& ps, const std::vector<bool>& is_noisy) {
  const int n = s.n();
  for (std::size_t x = 0; x < dim_of(n); ++x) {
    const VecF2 v = VecF2::from_index(n, x);
    bool all_zero = true;
    for (std::size_t i = 0; i < ps.size() && all_zero; ++i)
      if (!is_noisy[i] && ps[i].eval_bits(v.bits())) all_zero = false;
    if (all_zero != s.contains(v)) return false;
  }
  return true;
}

inline std::vector<Poly3F2> polys_for(const SubspaceF2& s, int m, int noisy, std::vector<bool>& is_noisy, Rng& rng,
                                      int max_attempts) {
  for (int a = 0; a < max_attempts; ++a) {
    auto ps = polys_draw(s, m, noisy, is_noisy, rng);
    if (s.n() > 12 || cuts_out(s, ps, is_noisy)) return ps;
  }
  throw std::invalid_argument("polys_generate: m too small, genuine polynomials never cut out the subspace");
}

}  // namespace detail

/// m polynomials vanishing on S and m vanishing on S-perp, each built as a
/// random degree <= 3 member of the canonical subspace's ideal composed with a
/// random linear chart onto the target. floor(noise_rate m) entries of each
/// list are then replaced by uniform random polynomials, resampled until they
/// vanish on between 1/4 and 3/4 of the subspace. Up to n = 12 the draw is
/// repeated until the genuine entries' common zero set is exactly the target;
/// failing that after `max_attempts` draws, m is too small.
inline PolyInstance polys_generate(const HsKey& key, int m, double noise_rate, Rng& rng, int max_attempts = 1000) {
  check_hs_width(key.n);
  if (m < key.n) throw std::invalid_argument("polys_generate: m must be at least n to determine S");
  if (!(noise_rate >= 0 && noise_rate < 0.5)) throw std::invalid_argument("polys_generate: noise_rate must be in [0, 0.5)");
  PolyInstance inst;
  inst.n = key.n;
  inst.serial = key.serial;
  inst.noisy_count = static_cast<int>(std::floor(noise_rate * m));
  inst.ps = detail::polys_for(key.subspace, m, inst.noisy_count, inst.noisy_p, rng, max_attempts);
  inst.qs = detail::polys_for(key.dual, m, inst.noisy_count, inst.noisy_q, rng, max_attempts);
  return inst;
}

/// Bit mask over all 2^n points (as basis indices): set where every listed
/// polynomial flagged in `use` vanishes.
inline std::vector<bool> common_zeros(int n, const std::vector<Poly3F2>& ps, const std::vector<bool>& use) {
  std::vector<bool> z(dim_of(n), true);
  for (std::size_t x = 0; x < z.size(); ++x) {
    const auto bits = VecF2::from_index(n, x).bits();
    for (std::size_t i = 0; i < ps.size() && z[x]; ++i)
      if (use[i] && ps[i].eval_bits(bits)) z[x] = false;
  }
  return z;
}

}  // namespace qmoney
