#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#ifndef QMONEY_VERSION
#define QMONEY_VERSION "unknown"
#endif

namespace qmoney::lab {

struct Metric {
  std::string name;
  double value = 0;
  double ci_low = 0;
  double ci_high = 0;
  long long trials = 0;  ///< 0 for exact (non-sampled) quantities
};

/// Exact quantity: the interval collapses to the value.
inline Metric exact(std::string name, double v) { return {std::move(name), v, v, v, 0}; }

/// Sampled proportion with its 3 sigma binomial interval, clipped to [0, 1].
inline Metric proportion(std::string name, long long hits, long long trials) {
  const double p = trials ? double(hits) / double(trials) : 0.0;
  const double h = trials ? 3 * std::sqrt(p * (1 - p) / double(trials)) : 0.0;
  return {std::move(name), p, std::max(0.0, p - h), std::min(1.0, p + h), trials};
}

/// Sample mean with a 3 sigma interval from the sample standard deviation.
inline Metric mean_of(std::string name, const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  if (xs.empty()) return {std::move(name), 0, 0, 0, 0};
  double s = 0, s2 = 0;
  for (double x : xs) s += x;
  const double m = s / n;
  for (double x : xs) s2 += (x - m) * (x - m);
  const double se = xs.size() > 1 ? std::sqrt(s2 / (n - 1) / n) : 0.0;
  return {std::move(name), m, m - 3 * se, m + 3 * se, static_cast<long long>(xs.size())};
}

struct ExperimentReport {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::vector<Metric> metrics;
  bool invariants_ok = true;
  std::vector<std::string> violations;
  std::optional<double> wall_seconds;

  void add(Metric m) { metrics.push_back(std::move(m)); }
  /// Records an invariant check; a failure makes the run exit with status 2.
  void require(bool ok, const std::string& what) {
    if (!ok) {
      invariants_ok = false;
      violations.push_back(what);
    }
  }
};

/// x rounded to 12 significant digits.
inline double sig12(double x) {
  if (!std::isfinite(x) || x == 0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string fmt12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// Keys come out sorted (nlohmann::json objects are ordered maps), and every
/// number is rounded to 12 significant digits, so equal runs give equal bytes.
inline nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& m : r.metrics)
    metrics.push_back({{"name", m.name},
                       {"value", sig12(m.value)},
                       {"ci_low", sig12(m.ci_low)},
                       {"ci_high", sig12(m.ci_high)},
                       {"trials", m.trials}});
  nlohmann::json j = {{"command", r.command},
                      {"config", r.config},
                      {"metrics", metrics},
                      {"invariants_ok", r.invariants_ok},
                      {"violations", r.violations},
                      {"library_version", QMONEY_VERSION}};
  if (r.wall_seconds) j["wall_seconds"] = sig12(*r.wall_seconds);
  return j;
}

inline std::string emit_json(const ExperimentReport& r) { return to_json(r).dump(2) + "\n"; }

inline std::string emit_csv(const ExperimentReport& r) {
  std::ostringstream os;
  os << "metric,value,ci_low,ci_high,trials\n";
  for (const auto& m : r.metrics)
    os << m.name << ',' << fmt12(m.value) << ',' << fmt12(m.ci_low) << ',' << fmt12(m.ci_high) << ',' << m.trials << '\n';
  return os.str();
}

inline std::string emit_report(const ExperimentReport& r, const std::string& format) {
  if (format == "json") return emit_json(r);
  if (format == "csv") return emit_csv(r);
  throw std::invalid_argument("unknown format '" + format + "'");
}

inline void write_output(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << bytes;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace qmoney::lab
