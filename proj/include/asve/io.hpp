#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "asve/error.hpp"
#include "asve/timescheme.hpp"
#include "asve/types.hpp"

namespace asve::io {

/// Shortest decimal text that round-trips the double, independent of the C locale.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Locale-independent parse of a full field; accepts "nan"/"inf" spellings.
inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

struct IngestOptions {
  std::size_t min_rows = 100;
};

struct IngestReport {
  RawTickData data;
  std::size_t dropped = 0;     // rows with price <= 0 or NaN
  std::size_t duplicates = 0;  // rows replaced by a later row with the same timestamp
};

/// Tick CSV with header `time,price`. Duplicate timestamps keep the last price; non-trade rows
/// are dropped and counted. Timestamps must be non-decreasing.
inline IngestReport parse_ticks(std::istream& in, const IngestOptions& opt = {}) {
  IngestReport rep;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = trim(line);
    if (body.empty()) continue;
    if (!header) {
      if (body != "time,price") throw ParseError(lineno, "expected header 'time,price'");
      header = true;
      continue;
    }
    const auto comma = body.find(',');
    if (comma == std::string_view::npos || body.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(lineno, "expected two fields");
    double t = 0.0;
    double p = 0.0;
    if (!parse_double(body.substr(0, comma), t) || !std::isfinite(t)) throw ParseError(lineno, "unparsable time");
    if (!parse_double(body.substr(comma + 1), p)) throw ParseError(lineno, "unparsable price");
    if (!(p > 0.0) || !std::isfinite(p)) {
      ++rep.dropped;
      continue;
    }
    auto& d = rep.data;
    if (!d.times.empty()) {
      if (t < d.times.back()) throw ParseError(lineno, "timestamps decrease");
      if (t == d.times.back()) {
        d.prices.back() = p;
        ++rep.duplicates;
        continue;
      }
    }
    d.times.push_back(t);
    d.prices.push_back(p);
  }
  if (!header) throw ParseError(lineno, "missing header");
  if (rep.data.size() < opt.min_rows)
    throw TooFewObservations("ingest: " + std::to_string(rep.data.size()) + " valid rows, need " +
                             std::to_string(opt.min_rows));
  return rep;
}

inline IngestReport ingest(const std::string& path, const IngestOptions& opt = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return parse_ticks(in, opt);
}

inline void write_ticks(std::ostream& out, const RawTickData& raw) {
  out << "time,price\n";
  for (std::size_t i = 0; i < raw.size(); ++i)
    out << format_double(raw.times[i]) << ',' << format_double(raw.prices[i]) << '\n';
}

inline void write_curve(std::ostream& out, const VolatilityCurve& c, std::string_view value_name = "sigma2") {
  out << "t," << value_name << '\n';
  for (std::size_t i = 0; i < c.size(); ++i) out << format_double(c.grid[i]) << ',' << format_double(c.values[i]) << '\n';
}

/// `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(lineno, "expected key = value");
    const auto key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(lineno, "empty key");
    kv[std::string(key)] = std::string(trim(body.substr(eq + 1)));
  }
  return kv;
}

inline std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return parse_config(in);
}

/// Realized variance of the series subsampled every `step` ticks, for each step.
inline std::vector<double> signature(const TickSeries& ticks, const std::vector<std::size_t>& steps) {
  const std::size_t n = ticks.size();
  std::vector<double> out;
  out.reserve(steps.size());
  for (std::size_t k : steps) {
    if (k < 1) throw InvalidInput("signature: step must be at least 1");
    if (k > n / 2) throw InvalidInput("signature: step larger than n/2");
    double rv = 0.0;
    for (std::size_t j = k; j < n; j += k) {
      const double d = ticks.values[j] - ticks.values[j - k];
      rv += d * d;
    }
    out.push_back(rv);
  }
  return out;
}

}  // namespace asve::io
