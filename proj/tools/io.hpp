#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qmoney/wiesner.hpp"

namespace qmoney::lab {

/// {"amplitudes": [[re, im], ...], "n": n, "serial": "<lowercase hex>"}
inline nlohmann::json note_to_json(const Banknote& note) {
  char hex[17];
  std::snprintf(hex, sizeof hex, "%llx", static_cast<unsigned long long>(note.serial));
  nlohmann::json amps = nlohmann::json::array();
  for (Eigen::Index i = 0; i < note.state.amps().size(); ++i)
    amps.push_back({note.state.amps()[i].real(), note.state.amps()[i].imag()});
  return {{"serial", hex}, {"n", note.state.n()}, {"amplitudes", amps}};
}

inline Banknote note_from_json(const nlohmann::json& j) {
  const std::string hex = j.at("serial").get<std::string>();
  if (hex.empty() || hex.size() > 16 || hex.find_first_not_of("0123456789abcdef") != std::string::npos)
    throw std::invalid_argument("note_from_json: serial must be 1-16 lowercase hex digits");
  const int n = j.at("n").get<int>();
  check_qubits(n, "note_from_json");
  const auto& a = j.at("amplitudes");
  if (!a.is_array() || a.size() != dim_of(n)) throw std::invalid_argument("note_from_json: need 2^n amplitudes");
  CVec v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_array() || a[i].size() != 2) throw std::invalid_argument("note_from_json: amplitude must be [re, im]");
    v[static_cast<Eigen::Index>(i)] = cplx(a[i][0].get<double>(), a[i][1].get<double>());
  }
  return {std::stoull(hex, nullptr, 16), PureState(n, std::move(v))};
}

}  // namespace qmoney::lab
