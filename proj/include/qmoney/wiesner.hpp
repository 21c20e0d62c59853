#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmoney/product_state.hpp"

namespace qmoney {

/// One BB84 state. Text symbols: 0, 1, +, -.
enum class Bb84 : std::uint8_t { zero, one, plus, minus };

inline char bb84_symbol(Bb84 b) { return "01+-"[static_cast<int>(b)]; }

inline Bb84 bb84_from_symbol(char c) {
  switch (c) {
    case '0': return Bb84::zero;
    case '1': return Bb84::one;
    case '+': return Bb84::plus;
    case '-': return Bb84::minus;
  }
  throw std::invalid_argument(std::string("bb84_from_symbol: bad symbol '") + c + "'");
}

/// Amplitudes of the BB84 state.
inline CVec bb84_vector(Bb84 b) {
  const double r = 1 / std::numbers::sqrt2;
  CVec v(2);
  switch (b) {
    case Bb84::zero: v << 1, 0; break;
    case Bb84::one: v << 0, 1; break;
    case Bb84::plus: v << r, r; break;
    case Bb84::minus: v << r, -r; break;
  }
  return v;
}

/// Unitary whose columns are the measurement basis containing `b`.
inline const CMat& bb84_basis(Bb84 b) {
  static const CMat z = gates::I().mat(), x = gates::H().mat();
  return (b == Bb84::zero || b == Bb84::one) ? z : x;
}

/// Outcome index of `b` in its own basis.
inline std::size_t bb84_bit(Bb84 b) { return (b == Bb84::one || b == Bb84::minus) ? 1 : 0; }

/// Classical description f(s) of a note: one BB84 symbol per qubit.
class BasisString {
 public:
  BasisString() = default;
  explicit BasisString(std::vector<Bb84> c) : c_(std::move(c)) {}

  static BasisString parse(std::string_view text) {
    std::vector<Bb84> c;
    for (char ch : text) c.push_back(bb84_from_symbol(ch));
    return BasisString(std::move(c));
  }

  static BasisString random(int n, Rng& rng) {
    std::vector<Bb84> c(static_cast<std::size_t>(n));
    for (auto& x : c) x = static_cast<Bb84>(rng.below(4));
    return BasisString(std::move(c));
  }

  int n() const { return static_cast<int>(c_.size()); }
  Bb84 operator[](int i) const { return c_.at(static_cast<std::size_t>(i)); }
  Bb84& operator[](int i) { return c_.at(static_cast<std::size_t>(i)); }
  const std::vector<Bb84>& choices() const { return c_; }
  bool operator==(const BasisString&) const = default;

  std::string str() const {
    std::string s;
    for (auto b : c_) s += bb84_symbol(b);
    return s;
  }

  /// Tensor product of the qubits, qubit 0 first.
  PureState state() const {
    if (c_.empty()) throw std::invalid_argument("BasisString::state: empty");
    if (n() > kMaxQubits) throw std::length_error("BasisString::state: capacity exceeded");
    CVec v = bb84_vector(c_[0]);
    for (std::size_t i = 1; i < c_.size(); ++i) v = kron(v, bb84_vector(c_[i]));
    return PureState(n(), std::move(v));
  }

 private:
  std::vector<Bb84> c_;
};

struct Banknote {
  std::uint64_t serial = 0;
  PureState state;
};

/// Several note registers of width n held as one joint state; register r
/// occupies qubits r*n .. r*n+n-1. Counterfeiters return these so that
/// entanglement between the forged notes is kept.
struct NoteBundle {
  int n = 0;
  std::vector<std::uint64_t> serials;
  ProductState state;

  int registers() const { return static_cast<int>(serials.size()); }
  std::vector<int> qubits_of(int r) const { return qubit_range(r * n, n); }

  static NoteBundle from_notes(const std::vector<Banknote>& notes) {
    if (notes.empty()) throw std::invalid_argument("NoteBundle::from_notes: no notes");
    const int n = notes[0].state.n();
    ProductState st(n * static_cast<int>(notes.size()));
    std::vector<std::uint64_t> serials;
    for (std::size_t r = 0; r < notes.size(); ++r) {
      if (notes[r].state.n() != n) throw std::invalid_argument("NoteBundle::from_notes: widths differ");
      st.place(notes[r].state, static_cast<int>(r) * n);
      serials.push_back(notes[r].serial);
    }
    return {n, std::move(serials), std::move(st)};
  }
};

/// Dense host: a state vector of which some qubits form the submitted note.
struct DenseHost {
  CVec& amps;
  int n;
  std::size_t measure(int q, const CMat& b, Rng& rng) {
    const int t[] = {q};
    apply_matrix_inplace(amps, n, b.adjoint(), t);
    const std::size_t o = measure_inplace(amps, n, t, rng);
    apply_matrix_inplace(amps, n, b, t);
    return o;
  }
};

/// Anything a bank can measure one qubit at a time.
template <class H>
concept QubitHost = requires(H& h, int q, const CMat& b, Rng& rng) {
  { h.measure(q, b, rng) } -> std::convertible_to<std::size_t>;
};

// ---- pseudorandom functions -------------------------------------------------

struct PrfKey {
  std::uint64_t hi = 0, lo = 0;
  static PrfKey random(Rng& rng) { return {rng.next_u64(), rng.next_u64()}; }
  bool operator==(const PrfKey&) const = default;
};

/// f_k(serial) -> BasisString of width n, deterministic in its arguments.
template <class P>
concept PrfContract = requires(const P& p, const PrfKey& k, std::uint64_t serial, int n) {
  { p.eval(k, serial, n) } -> std::same_as<BasisString>;
};

/// Non-cryptographic stand-in: splitmix64 over (key, serial) seeds a stream
/// that draws the n symbols.
struct SplitMixPrf {
  BasisString eval(const PrfKey& k, std::uint64_t serial, int n) const {
    const std::uint64_t h = splitmix64(k.lo ^ splitmix64(k.hi ^ splitmix64(serial ^ 0x9e3779b97f4a7c15ULL)));
    Rng r(h);
    return BasisString::random(n, r);
  }
};

/// Stored table posing as a PRF; the key is ignored.
struct TablePrf {
  std::map<std::uint64_t, BasisString> table;
  BasisString eval(const PrfKey&, std::uint64_t serial, int) const {
    const auto it = table.find(serial);
    if (it == table.end()) throw std::invalid_argument("TablePrf: serial not in table");
    return it->second;
  }
};

// ---- description sources ----------------------------------------------------

/// Wiesner: a database of independently drawn descriptions.
class TableSource {
 public:
  BasisString issue(std::uint64_t serial, int n, Rng& rng) {
    auto b = BasisString::random(n, rng);
    table_.emplace(serial, b);
    return b;
  }
  std::optional<BasisString> lookup(std::uint64_t serial, int) const {
    const auto it = table_.find(serial);
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }
  bool issued(std::uint64_t serial) const { return table_.count(serial) != 0; }
  std::size_t size() const { return table_.size(); }
  const std::map<std::uint64_t, BasisString>& table() const { return table_; }

 private:
  std::map<std::uint64_t, BasisString> table_;
};

/// BBBW: descriptions recomputed from one key. Stores nothing per note, so
/// serial freshness is not tracked and every serial is valid.
template <PrfContract P = SplitMixPrf>
class PrfSource {
 public:
  PrfSource(PrfKey key, P prf = P{}) : key_(key), prf_(std::move(prf)) {}
  BasisString issue(std::uint64_t serial, int n, Rng&) const { return prf_.eval(key_, serial, n); }
  std::optional<BasisString> lookup(std::uint64_t serial, int n) const { return prf_.eval(key_, serial, n); }
  bool issued(std::uint64_t) const { return false; }
  std::size_t size() const { return 0; }
  const PrfKey& key() const { return key_; }

 private:
  PrfKey key_;
  P prf_;
};

// ---- bank -------------------------------------------------------------------

/// naive_return hands the measured note back whatever the verdict; strict
/// destroys rejected notes and logs the failure against the serial.
enum class BankMode { naive_return, strict };

struct VerifyResult {
  bool accepted = false;
  std::optional<Banknote> returned;  ///< empty when the note was destroyed
};

class UnknownSerial : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Private-key bank over n-qubit notes with serial_bits-bit serials
/// (default n). Verification measures each qubit in its recorded basis and
/// accepts iff every outcome matches; a legitimate note is left unchanged.
template <class Source>
class Bank {
 public:
  Bank(int n, BankMode mode, Source source, Rng rng, int serial_bits = 0)
      : n_(n), serial_bits_(serial_bits > 0 ? serial_bits : n), mode_(mode), source_(std::move(source)), rng_(rng) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("Bank: n must be in [1, 20]");
    if (serial_bits_ > 64) throw std::invalid_argument("Bank: serial_bits must be <= 64");
  }

  int n() const { return n_; }
  BankMode mode() const { return mode_; }

  /// Fresh uniform serial, description from the source, note state.
  Banknote mint() {
    const std::uint64_t space = serial_bits_ >= 64 ? 0 : (std::uint64_t{1} << serial_bits_);
    if (space != 0 && source_.size() >= space) throw std::length_error("Bank::mint: serial space exhausted");
    std::uint64_t serial;
    do serial = space == 0 ? rng_.next_u64() : rng_.below(space);
    while (source_.issued(serial));
    const BasisString f = source_.issue(serial, n_, rng_);
    return {serial, f.state()};
  }

  /// Measures the qubits `qubits` of `host` as note `serial`. Counts one
  /// verification; strict mode logs a rejection.
  template <QubitHost H>
  bool verify_in_place(std::uint64_t serial, H& host, std::span<const int> qubits, Rng& rng) {
    if (static_cast<int>(qubits.size()) != n_) throw std::invalid_argument("Bank::verify: register width mismatch");
    const auto f = source_.lookup(serial, n_);
    if (!f) throw UnknownSerial("Bank::verify: unknown serial " + std::to_string(serial));
    ++verifications_;
    bool ok = true;
    for (int i = 0; i < n_; ++i) {
      const Bb84 b = (*f)[i];
      if (host.measure(qubits[static_cast<std::size_t>(i)], bb84_basis(b), rng) != bb84_bit(b)) ok = false;
    }
    if (!ok && mode_ == BankMode::strict) ++failure_log_[serial];
    return ok;
  }

  VerifyResult verify(Banknote note, Rng& rng) {
    if (note.state.n() != n_) throw std::invalid_argument("Bank::verify: register width mismatch");
    CVec amps = note.state.amps();
    DenseHost host{amps, n_};
    const auto qs = qubit_range(0, n_);
    const bool ok = verify_in_place(note.serial, host, qs, rng);
    if (!ok && mode_ == BankMode::strict) return {false, std::nullopt};
    return {ok, Banknote{note.serial, PureState(n_, std::move(amps))}};
  }

  std::uint64_t verifications() const { return verifications_; }
  std::uint64_t failures(std::uint64_t serial) const {
    const auto it = failure_log_.find(serial);
    return it == failure_log_.end() ? 0 : it->second;
  }
  std::uint64_t total_failures() const {
    std::uint64_t t = 0;
    for (const auto& [s, c] : failure_log_) t += c;
    return t;
  }
  const std::map<std::uint64_t, std::uint64_t>& failure_log() const { return failure_log_; }

  /// Ground truth for tests and reports. Attacks never call this.
  const Source& source() const { return source_; }

 private:
  int n_;
  int serial_bits_;
  BankMode mode_;
  Source source_;
  Rng rng_;
  std::uint64_t verifications_ = 0;
  std::map<std::uint64_t, std::uint64_t> failure_log_;
};

using WiesnerBank = Bank<TableSource>;
template <PrfContract P = SplitMixPrf>
using BbbwBank = Bank<PrfSource<P>>;

inline WiesnerBank make_wiesner_bank(int n, BankMode mode, Rng rng, int serial_bits = 0) {
  return WiesnerBank(n, mode, TableSource{}, rng, serial_bits);
}

template <PrfContract P = SplitMixPrf>
inline BbbwBank<P> make_bbbw_bank(int n, BankMode mode, PrfKey key, Rng rng, P prf = P{}, int serial_bits = 0) {
  return BbbwBank<P>(n, mode, PrfSource<P>(key, std::move(prf)), rng, serial_bits);
}

/// A "bank" that accepts everything without measuring; the control for
/// attacks whose only leverage is the bank's measurement.
class DudBank {
 public:
  explicit DudBank(int n) : n_(n) {}
  int n() const { return n_; }
  template <QubitHost H>
  bool verify_in_place(std::uint64_t, H&, std::span<const int>, Rng&) {
    ++verifications_;
    return true;
  }
  std::uint64_t verifications() const { return verifications_; }
  std::uint64_t total_failures() const { return 0; }

 private:
  int n_;
  std::uint64_t verifications_ = 0;
};

/// Count(k, registers): verifies each register of the bundle in order on the
/// shared joint state and returns the number accepted.
template <class B>
int count(B& bank, NoteBundle& bundle, Rng& rng) {
  int accepted = 0;
  for (int r = 0; r < bundle.registers(); ++r) {
    const auto qs = bundle.qubits_of(r);
    if (bank.verify_in_place(bundle.serials[static_cast<std::size_t>(r)], bundle.state, qs, rng)) ++accepted;
  }
  return accepted;
}

template <class B>
int count(B& bank, const std::vector<Banknote>& notes, Rng& rng) {
  if (notes.empty()) return 0;
  auto bundle = NoteBundle::from_notes(notes);
  return count(bank, bundle, rng);
}

}  // namespace qmoney
