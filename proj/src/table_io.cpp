// Copyright the rsum contributors.
// SPDX-License-Identifier: Apache-2.0

#include "rsum/table_io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "rsum/errors.hpp"

namespace rsum {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

double number_from(const nlohmann::json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DomainError("cannot parse '" + text + "' as a number");
  }
  return v;
}

void write_table_csv(std::ostream& out, const RestrictedMomentTable& table) {
  out << "ell,value\n";
  for (Eigen::Index l = 0; l < table.values.size(); ++l) {
    out << l << ',' << format_double(table.values[l]) << '\n';
  }
}

Eigen::VectorXd read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("table CSV: missing header");
  strip_cr(line);
  if (line != "ell,value") throw DomainError("table CSV: unexpected header '" + line + "'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 2) throw DomainError("table CSV: malformed record '" + line + "'");
    if (static_cast<std::size_t>(parse_double(f[0])) != values.size()) {
      throw DomainError("table CSV: records out of order at '" + line + "'");
    }
    values.push_back(parse_double(f[1]));
  }
  return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

void write_curve_csv(std::ostream& out, const PredictionCurve& curve) {
  out << "ell,value,defined,mass\n";
  for (const PredictionEntry& e : curve.entries) {
    out << e.ell << ',' << format_double(e.value) << ',' << (e.defined ? 1 : 0) << ','
        << format_double(e.mass) << '\n';
  }
}

PredictionCurve read_curve_csv(std::istream& in, int k, double mass_floor) {
  std::string line;
  if (!std::getline(in, line)) throw DomainError("curve CSV: missing header");
  strip_cr(line);
  if (line != "ell,value,defined,mass") {
    throw DomainError("curve CSV: unexpected header '" + line + "'");
  }
  PredictionCurve curve;
  curve.k = k;
  curve.mass_floor = mass_floor;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 4) throw DomainError("curve CSV: malformed record '" + line + "'");
    PredictionEntry e;
    e.ell = static_cast<int>(parse_double(f[0]));
    e.value = parse_double(f[1]);
    if (f[2] != "0" && f[2] != "1") throw DomainError("curve CSV: bad defined flag '" + f[2] + "'");
    e.defined = f[2] == "1";
    e.mass = parse_double(f[3]);
    curve.entries.push_back(e);
  }
  return curve;
}

nlohmann::json to_json(const TableDiagnostics& d) {
  nlohmann::json j;
  j["mass_deficit"] = number_or_null(d.mass_deficit);
  j["unstable_prefix"] = d.unstable_prefix ? nlohmann::json(*d.unstable_prefix) : nullptr;
  j["clamped_count"] = d.clamped_count;
  j["max_imag_residue"] = number_or_null(d.max_imag_residue);
  j["mass_check_failed"] = d.mass_check_failed;
  if (d.grid) {
    j["grid"] = {{"grid_size", d.grid->grid_size}, {"aliasing_guard", d.grid->aliasing_guard}};
  } else {
    j["grid"] = nullptr;
  }
  return j;
}

nlohmann::json to_json(const RestrictedMomentTable& t) {
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index l = 0; l < t.values.size(); ++l) values.push_back(number_or_null(t.values[l]));
  return {{"k", t.k},
          {"target", to_string(t.target)},
          {"method", to_string(t.method)},
          {"diagnostics", to_json(t.diagnostics)},
          {"values", values}};
}

RestrictedMomentTable table_from_json(const nlohmann::json& j) {
  try {
    RestrictedMomentTable t;
    t.k = j.at("k").get<int>();
    t.target = target_from_string(j.at("target").get<std::string>());
    t.method = method_from_string(j.at("method").get<std::string>());
    const auto& v = j.at("values");
    t.values.resize(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) t.values[static_cast<Eigen::Index>(i)] = number_from(v[i]);
    if (j.contains("diagnostics")) {
      const auto& d = j["diagnostics"];
      t.diagnostics.mass_deficit = number_from(d.value("mass_deficit", nlohmann::json(0.0)));
      if (d.contains("unstable_prefix") && !d["unstable_prefix"].is_null()) {
        t.diagnostics.unstable_prefix = d["unstable_prefix"].get<int>();
      }
      t.diagnostics.clamped_count = d.value("clamped_count", 0);
      t.diagnostics.max_imag_residue =
          number_from(d.value("max_imag_residue", nlohmann::json(0.0)));
      t.diagnostics.mass_check_failed = d.value("mass_check_failed", false);
      if (d.contains("grid") && !d["grid"].is_null()) {
        t.diagnostics.grid =
            GridInfo{d["grid"].at("grid_size").get<int>(), d["grid"].at("aliasing_guard").get<int>()};
      }
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("table JSON: ") + e.what());
  }
}

nlohmann::json to_json(const PredictionCurve& c) {
  nlohmann::json entries = nlohmann::json::array();
  for (const PredictionEntry& e : c.entries) {
    entries.push_back({{"ell", e.ell},
                       {"value", number_or_null(e.value)},
                       {"defined", e.defined},
                       {"mass", number_or_null(e.mass)}});
  }
  return {{"k", c.k}, {"mass_floor", c.mass_floor}, {"entries", entries}};
}

nlohmann::json to_json(const StabilityReport& r) {
  auto opt = [](const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"rel_tol", r.rel_tol},
          {"unstable_prefix_end", opt(r.unstable_prefix_end)},
          {"tail_disagreement_start", opt(r.tail_disagreement_start)},
          {"reference_mode", r.reference_mode},
          {"suffix_count", r.suffix_count},
          {"suffix_max_rel", number_or_null(r.suffix_max_rel)},
          {"suffix_mean_rel", number_or_null(r.suffix_mean_rel)}};
}

nlohmann::json to_json(const OracleReport& r) {
  nlohmann::json j;
  j["target"] = r.target;
  j["mode"] = r.exact ? "exact" : "monte_carlo";
  j["estimator"] = r.estimator;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    nlohmann::json row = {{"at", r.grid[i]}, {"value", number_or_null(r.values[i])}};
    if (!r.exact) {
      row["std_error"] = number_or_null(r.std_errors[i]);
      if (i < r.bin_counts.size()) row["count"] = r.bin_counts[i];
      if (i < r.empty.size()) row["empty"] = static_cast<bool>(r.empty[i]);
    }
    rows.push_back(row);
  }
  j["values"] = rows;
  if (r.certificate) {
    j["certificate"] = {{"n_max", r.certificate->n_max},
                        {"count_tail", r.certificate->count_tail},
                        {"severity_tail", r.certificate->severity_tail},
                        {"tolerance", r.certificate->tolerance}};
  }
  if (!r.exact) {
    j["samples"] = r.samples;
    j["seed"] = r.seed;
  }
  return j;
}

nlohmann::json envelope(const nlohmann::json& config, std::optional<std::uint64_t> seed,
                        const nlohmann::json& diagnostics, const nlohmann::json& data) {
  nlohmann::json meta = {{"version", kVersion}, {"config", config}};
  meta["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json();
  return {{"meta", meta}, {"diagnostics", diagnostics}, {"data", data}};
}

}  // namespace rsum
