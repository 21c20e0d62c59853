#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmoney/state.hpp"

namespace qmoney {

/// Truth table of A : {0,1}^n_in -> {0,1}^n_out with query accounting.
///
/// Inputs and outputs are read from qubit registers most significant bit first,
/// so in_qubits[0] carries the top bit of x. Counters are mutable: a copied
/// oracle starts its own tally, and one instance must stay on one thread.
class BooleanOracle {
 public:
  BooleanOracle(int n_in, int n_out, std::vector<std::uint64_t> table)
      : n_in_(n_in), n_out_(n_out), table_(std::move(table)) {
    if (n_in < 1 || n_in > kMaxQubits) throw std::invalid_argument("BooleanOracle: bad input width");
    if (n_out < 1 || n_out > 63) throw std::invalid_argument("BooleanOracle: bad output width");
    if (table_.size() != dim_of(n_in)) throw std::invalid_argument("BooleanOracle: table length is not 2^n_in");
    for (auto v : table_)
      if (v >> n_out) throw std::invalid_argument("BooleanOracle: table entry wider than n_out");
  }

  template <class F>
  static BooleanOracle from_function(int n_in, int n_out, F&& f) {
    std::vector<std::uint64_t> t(dim_of(n_in));
    for (std::size_t x = 0; x < t.size(); ++x) t[x] = static_cast<std::uint64_t>(f(static_cast<std::uint64_t>(x)));
    return BooleanOracle(n_in, n_out, std::move(t));
  }

  int n_in() const { return n_in_; }
  int n_out() const { return n_out_; }
  const std::vector<std::uint64_t>& table() const { return table_; }

  /// Uncounted lookup, for instance construction and test oracles.
  std::uint64_t peek(std::uint64_t x) const { return table_.at(x); }
  /// Counted classical query.
  std::uint64_t query(std::uint64_t x) const {
    ++classical_queries_;
    return table_.at(x);
  }

  std::uint64_t quantum_queries() const { return quantum_queries_; }
  std::uint64_t classical_queries() const { return classical_queries_; }
  void note_quantum_query() const { ++quantum_queries_; }
  void reset_counters() const { quantum_queries_ = classical_queries_ = 0; }

 private:
  int n_in_;
  int n_out_;
  std::vector<std::uint64_t> table_;
  mutable std::uint64_t quantum_queries_ = 0;
  mutable std::uint64_t classical_queries_ = 0;
};

namespace detail {

inline void check_oracle_registers(int n, const BooleanOracle& o, std::span<const int> in, std::span<const int> out) {
  if (static_cast<int>(in.size()) != o.n_in()) throw std::invalid_argument("oracle: input register width mismatch");
  if (!out.empty() && static_cast<int>(out.size()) != o.n_out())
    throw std::invalid_argument("oracle: output register width mismatch");
  std::vector<int> all(in.begin(), in.end());
  all.insert(all.end(), out.begin(), out.end());
  try {
    check_targets(n, all, "oracle");
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("oracle: registers overlap or are out of range");
  }
}

}  // namespace detail

/// |x, z> -> |x, z xor A(x)>. One quantum query.
inline void apply_xor_oracle_inplace(CVec& amps, int n, const BooleanOracle& o, std::span<const int> in,
                                     std::span<const int> out) {
  detail::check_oracle_registers(n, o, in, out);
  const detail::Register rin(n, in), rout(n, out);
  CVec next(amps.size());
  for (std::size_t i = 0; i < dim_of(n); ++i) {
    const std::uint64_t z = rout.read(i) ^ o.peek(rin.read(i));
    next[static_cast<Eigen::Index>(rout.write(i, z))] = amps[static_cast<Eigen::Index>(i)];
  }
  amps = std::move(next);
  o.note_quantum_query();
}

/// |x, z> -> (-1)^{z.A(x)} |x, z>. With an empty z register the output must be
/// one bit and the phase is (-1)^{A(x)}. One quantum query.
inline void apply_phase_oracle_inplace(CVec& amps, int n, const BooleanOracle& o, std::span<const int> in,
                                       std::span<const int> z = {}) {
  detail::check_oracle_registers(n, o, in, z);
  if (z.empty() && o.n_out() != 1) throw std::invalid_argument("phase oracle: z register required for n_out > 1");
  const detail::Register rin(n, in), rz(n, z);
  for (std::size_t i = 0; i < dim_of(n); ++i) {
    const std::uint64_t a = o.peek(rin.read(i));
    const std::uint64_t zz = z.empty() ? 1 : rz.read(i);
    if (std::popcount(a & zz) & 1) amps[static_cast<Eigen::Index>(i)] = -amps[static_cast<Eigen::Index>(i)];
  }
  o.note_quantum_query();
}

inline PureState apply_xor_oracle(const PureState& s, const BooleanOracle& o, std::span<const int> in,
                                  std::span<const int> out) {
  CVec a = s.amps();
  apply_xor_oracle_inplace(a, s.n(), o, in, out);
  return PureState(s.n(), std::move(a));
}

inline PureState apply_phase_oracle(const PureState& s, const BooleanOracle& o, std::span<const int> in,
                                    std::span<const int> z = {}) {
  CVec a = s.amps();
  apply_phase_oracle_inplace(a, s.n(), o, in, z);
  return PureState(s.n(), std::move(a));
}

/// Truth table text: line x holds A(x) as an n_out-character binary string, most significant bit first.
inline BooleanOracle parse_truth_table(std::istream& in) {
  std::vector<std::uint64_t> t;
  int width = -1;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (width < 0) width = static_cast<int>(line.size());
    if (static_cast<int>(line.size()) != width) throw std::invalid_argument("truth table: ragged line widths");
    std::uint64_t v = 0;
    for (char c : line) {
      if (c != '0' && c != '1') throw std::invalid_argument("truth table: expected 0/1 characters");
      v = (v << 1) | static_cast<std::uint64_t>(c - '0');
    }
    t.push_back(v);
  }
  const int n_in = log2_exact(t.size());
  if (n_in < 1) throw std::invalid_argument("truth table: line count must be a power of two >= 2");
  return BooleanOracle(n_in, width, std::move(t));
}

inline std::string format_truth_table(const BooleanOracle& o) {
  std::string s;
  for (auto v : o.table()) {
    for (int j = o.n_out() - 1; j >= 0; --j) s += ((v >> j) & 1) ? '1' : '0';
    s += '\n';
  }
  return s;
}

}  // namespace qmoney
