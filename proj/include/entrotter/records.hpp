#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace entrotter {

using OptD = std::optional<double>;

// One CSV row. Cells that do not apply stay empty.
struct ExperimentRecord {
  std::string experiment;
  std::string model;
  std::string geometry;
  std::size_t n = 0;
  std::size_t L = 0;
  OptD J, h, d, t;
  int p = 1;
  std::size_t r = 1;
  std::optional<std::size_t> chi_max;
  OptD cutoff;
  std::uint64_t seed = 0;
  std::string backend;
  std::string curve_provenance = "measured";
  OptD S_max_initial, S_star, error, bound_standard, bound_ent_first, bound_ent_p,
      discarded_weight, improvement, runtime_ms;

  bool operator==(const ExperimentRecord&) const = default;
};

inline constexpr std::array<const char*, 25> kCsvColumns = {
    "experiment", "model",          "geometry",        "n",           "L",
    "J",          "h",              "d",               "t",           "p",
    "r",          "chi_max",        "cutoff",          "seed",        "backend",
    "curve_provenance", "S_max_initial", "S_star",     "error",       "bound_standard",
    "bound_ent_first",  "bound_ent_p",   "discarded_weight", "improvement", "runtime_ms"};

inline std::string csv_header() {
  std::string h;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) h += ',';
    h += kCsvColumns[i];
  }
  return h;
}

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt(const OptD& v) { return v ? fmt_double(*v) : std::string(); }

inline void check_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") != std::string::npos)
    throw std::invalid_argument("CSV text cell may not contain commas, quotes or newlines: '" + s +
                                "'");
}

inline OptD parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad numeric CSV cell '" + s + "'");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer CSV cell '" + s + "'");
  return v;
}

}  // namespace detail

inline std::string to_csv_row(const ExperimentRecord& r) {
  using detail::fmt;
  for (const auto* s : {&r.experiment, &r.model, &r.geometry, &r.backend, &r.curve_provenance})
    detail::check_cell(*s);
  const std::array<std::string, 25> cells = {
      r.experiment,
      r.model,
      r.geometry,
      std::to_string(r.n),
      std::to_string(r.L),
      fmt(r.J),
      fmt(r.h),
      fmt(r.d),
      fmt(r.t),
      std::to_string(r.p),
      std::to_string(r.r),
      r.chi_max ? std::to_string(*r.chi_max) : std::string(),
      fmt(r.cutoff),
      std::to_string(r.seed),
      r.backend,
      r.curve_provenance,
      fmt(r.S_max_initial),
      fmt(r.S_star),
      fmt(r.error),
      fmt(r.bound_standard),
      fmt(r.bound_ent_first),
      fmt(r.bound_ent_p),
      fmt(r.discarded_weight),
      fmt(r.improvement),
      fmt(r.runtime_ms)};
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line;
}

inline ExperimentRecord from_csv_row(const std::string& line) {
  std::vector<std::string> c;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) c.push_back(cell);
  if (!line.empty() && line.back() == ',') c.emplace_back();
  if (c.size() != kCsvColumns.size())
    throw std::invalid_argument("CSV row has " + std::to_string(c.size()) + " cells, expected " +
                                std::to_string(kCsvColumns.size()));
  using detail::parse_opt;
  using detail::parse_u64;
  ExperimentRecord r;
  r.experiment = c[0];
  r.model = c[1];
  r.geometry = c[2];
  r.n = parse_u64(c[3]);
  r.L = parse_u64(c[4]);
  r.J = parse_opt(c[5]);
  r.h = parse_opt(c[6]);
  r.d = parse_opt(c[7]);
  r.t = parse_opt(c[8]);
  r.p = std::stoi(c[9]);
  r.r = parse_u64(c[10]);
  if (!c[11].empty()) r.chi_max = parse_u64(c[11]);
  r.cutoff = parse_opt(c[12]);
  r.seed = parse_u64(c[13]);
  r.backend = c[14];
  r.curve_provenance = c[15];
  r.S_max_initial = parse_opt(c[16]);
  r.S_star = parse_opt(c[17]);
  r.error = parse_opt(c[18]);
  r.bound_standard = parse_opt(c[19]);
  r.bound_ent_first = parse_opt(c[20]);
  r.bound_ent_p = parse_opt(c[21]);
  r.discarded_weight = parse_opt(c[22]);
  r.improvement = parse_opt(c[23]);
  r.runtime_ms = parse_opt(c[24]);
  return r;
}

inline std::string to_csv(const std::vector<ExperimentRecord>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += to_csv_row(r) + "\n";
  return out;
}

inline std::vector<ExperimentRecord> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header())
    throw std::invalid_argument("CSV header does not match the record schema");
  std::vector<ExperimentRecord> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(from_csv_row(line));
  return rows;
}

// Output order: by key columns, never by completion order.
inline bool record_key_less(const ExperimentRecord& a, const ExperimentRecord& b) {
  auto key = [](const ExperimentRecord& r) {
    return std::make_tuple(std::cref(r.experiment), std::cref(r.model), std::cref(r.curve_provenance),
                           std::cref(r.backend), r.n, r.p, r.r, r.t.value_or(0.0),
                           r.S_max_initial.value_or(-1.0), r.seed);
  };
  return key(a) < key(b);
}

inline void sort_records(std::vector<ExperimentRecord>& rows) {
  std::stable_sort(rows.begin(), rows.end(), record_key_less);
}

}  // namespace entrotter
