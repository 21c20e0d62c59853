#pragma once

#include <concepts>
#include <cstdint>
#include <cstdio>
#include <string>

#include "qmoney/hidden_subspace.hpp"

namespace qmoney {

/// Signature scheme the bank signs serials with. Verification must be
/// deterministic.
template <class S>
concept SignerContract = requires(const S& s, std::uint64_t serial, const std::string& sig) {
  { s.sign(serial) } -> std::convertible_to<std::string>;
  { s.verify(serial, sig) } -> std::same_as<bool>;
};

/// Keyed tag over the serial, hex encoded. A MAC, not a public-key
/// signature, and not cryptographic: it stands in for any SignerContract.
struct ToyMacSigner {
  PrfKey key;

  std::string sign(std::uint64_t serial) const {
    const std::uint64_t t = splitmix64(splitmix64(key.hi ^ serial) ^ key.lo);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(t));
    return buf;
  }
  bool verify(std::uint64_t serial, const std::string& sig) const { return sig == sign(serial); }
};

struct SignedNote {
  std::uint64_t serial = 0;
  std::string signature;
  PureState state;
};

struct FullVerifyResult {
  bool accepted = false;
  bool signature_ok = false;
  PureState state;  ///< untouched when the signature fails
};

/// Draws a fresh subspace, registers it, and signs its handle.
template <SignerContract S>
SignedNote full_scheme_mint(const S& signer, HsOracle& oracle, int n, Rng& rng) {
  const HsKey key = oracle.issue(n, rng);
  return {key.serial, signer.sign(key.serial), subspace_state(key.subspace)};
}

/// Signature first; only a valid signature reaches the quantum check.
template <SignerContract S>
FullVerifyResult full_scheme_verify(const S& signer, HsOracle& oracle, const SignedNote& note, Rng& rng) {
  if (!signer.verify(note.serial, note.signature)) return {false, false, note.state};
  auto v = hs_verify(oracle, note.serial, note.state, rng);
  return {v.accepted, true, std::move(v.state)};
}

}  // namespace qmoney
